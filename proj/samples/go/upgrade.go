package upgrade

import (
	"errors"
	"fmt"
	"strings"
)

// Release describes one published build. Calls in comments such as
// fetch(url) must not become edges.
type Release struct {
	Tag    string
	Assets []string
}

var errNoRelease = errors.New("upgrade: no matching release")

func compareVersions(a, b string) int {
	pa := strings.Split(a, ".")
	pb := strings.Split(b, ".")
	for i := 0; i < len(pa) && i < len(pb); i++ {
		if pa[i] != pb[i] {
			return strings.Compare(pa[i], pb[i])
		}
	}
	return len(pa) - len(pb)
}

func selectRelease(rels []Release, current string) (Release, error) {
	for _, rel := range rels {
		if compareVersions(rel.Tag, current) > 0 && hasAsset(rel) {
			return rel, nil
		}
	}
	return Release{}, errNoRelease
}

func hasAsset(rel Release) bool {
	return len(rel.Assets) > 0
}

func (r *Release) Describe() string {
	name := strings.TrimPrefix(r.Tag, "v")
	return fmt.Sprintf("release %s (%d assets)", name, len(r.Assets))
}

func ToURL(rel Release) string {
	log("resolving url(rel)")
	return fmt.Sprintf("https://example.invalid/%s", rel.Tag)
}

func log(msg string) {
	fmt.Println(msg)
}
