/*  Copyright 2026 The factlog Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License. */

#include "factlog/template.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "factlog/error.hpp"

namespace factlog {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Flattened template: one element per literal character, collapsed
// whitespace runs, and holes.
struct Element {
  enum Kind { Char, Space, HoleEl } kind;
  char c = 0;
  HoleKind hole = HoleKind::Expression;
  int slot = -1;  // binding slot; -1 for anonymous holes
  bool leading = false;
  bool last = false;
};

struct Compiled {
  std::vector<Element> elements;
  std::vector<std::string> slot_names;
  bool multiline = false;
};

Compiled compile(const Template& t) {
  Compiled out;
  for (const auto& atom : t.atoms) {
    if (const auto* lit = std::get_if<Literal>(&atom)) {
      for (char c : lit->text) {
        if (c == '\n') out.multiline = true;
        if (is_space(c)) {
          if (out.elements.empty() || out.elements.back().kind != Element::Space)
            out.elements.push_back({Element::Space});
        } else {
          out.elements.push_back({Element::Char, c});
        }
      }
    } else {
      const auto& hole = std::get<Hole>(atom);
      Element e{Element::HoleEl};
      e.hole = hole.kind;
      if (hole.kind != HoleKind::Anonymous) {
        e.slot = static_cast<int>(out.slot_names.size());
        out.slot_names.push_back(hole.name);
      }
      out.elements.push_back(e);
    }
  }
  while (!out.elements.empty() && out.elements.front().kind == Element::Space)
    out.elements.erase(out.elements.begin());
  while (!out.elements.empty() && out.elements.back().kind == Element::Space)
    out.elements.pop_back();
  if (!out.elements.empty()) {
    out.elements.front().leading = true;
    out.elements.back().last = true;
  }
  return out;
}

class Matcher {
 public:
  Matcher(const Compiled& c, const SourceMap& map, std::size_t lo,
          std::size_t hi)
      : c_(c), map_(map), src_(map.source()), lo_(lo), hi_(hi),
        slots_(c.slot_names.size()) {}

  // Attempts a match starting exactly at `p`.
  std::optional<Match> try_at(std::size_t p) {
    start_ = p;
    for (auto& s : slots_) s.reset();
    if (!step(0, p)) return std::nullopt;
    Match m;
    m.begin = p;
    m.end = end_;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!slots_[i]) continue;
      auto [b, e] = *slots_[i];
      Position pos = map_.position(b);
      m.env.bindings[c_.slot_names[i]] =
          Binding{std::string(src_.substr(b, e - b)), b, e, pos.line,
                  pos.column};
    }
    return m;
  }

  bool can_start_at(std::size_t p) const {
    Region r = map_.region_at(p);
    if (r == Region::Comment || r == Region::StringBody) return false;
    if (r == Region::StringDelimiter && !opens_at(p)) return false;
    const Element& first = c_.elements.front();
    if (first.kind == Element::Char) {
      if (src_[p] != first.c) return false;
      if (ident(first.c) && p > 0 && ident(src_[p - 1])) return false;
    }
    if (first.kind == Element::HoleEl &&
        (first.hole == HoleKind::Expression ||
         first.hole == HoleKind::Optional) &&
        !ident(src_[p]))
      return false;
    return true;
  }

 private:
  bool ident(char c) const { return map_.language().is_identifier_char(c); }

  bool opens_at(std::size_t p) const {
    return map_.regions()[map_.region_index(p)].opens;
  }

  std::size_t unit_end_at(std::size_t p) const {
    return map_.regions()[map_.region_index(p)].unit_end;
  }

  std::size_t identifier_end(std::size_t p) const {
    std::size_t q = p;
    while (q < hi_ && map_.region_at(q) == Region::Code && ident(src_[q])) ++q;
    return q;
  }

  bool step(std::size_t i, std::size_t p) {
    if (i == c_.elements.size()) return finish(p);
    const Element& el = c_.elements[i];
    switch (el.kind) {
      case Element::Char:
        if (p < hi_ && src_[p] == el.c && map_.region_at(p) != Region::Comment)
          return step(i + 1, p + 1);
        return false;
      case Element::Space:
        return space(i, p);
      case Element::HoleEl:
        break;
    }
    switch (el.hole) {
      case HoleKind::Expression:
      case HoleKind::Optional: {
        auto ends = expression_ends(p, el.leading);
        // Expression holes are lazy unless nothing follows to anchor them;
        // optional holes are greedy and fall back to binding nothing.
        bool greedy = el.last || el.hole == HoleKind::Optional;
        if (greedy) std::reverse(ends.begin(), ends.end());
        for (std::size_t e : ends)
          if (bind(i, el, p, e)) return true;
        if (el.hole == HoleKind::Optional) return bind(i, el, p, p);
        return false;
      }
      case HoleKind::Everything:
      case HoleKind::Anonymous: {
        auto ends = everything_ends(p);
        if (el.last) std::reverse(ends.begin(), ends.end());
        for (std::size_t e : ends)
          if (bind(i, el, p, e)) return true;
        return false;
      }
      case HoleKind::StringBody: {
        if (auto e = string_body_end(p)) return bind(i, el, p, *e);
        return false;
      }
    }
    return false;
  }

  bool bind(std::size_t i, const Element& el, std::size_t b, std::size_t e) {
    if (el.slot < 0) return step(i + 1, e);
    auto saved = slots_[static_cast<std::size_t>(el.slot)];
    slots_[static_cast<std::size_t>(el.slot)] = std::pair{b, e};
    if (step(i + 1, e)) return true;
    slots_[static_cast<std::size_t>(el.slot)] = saved;
    return false;
  }

  bool finish(std::size_t p) {
    if (p == start_) return false;
    const Element& last = c_.elements.back();
    if (last.kind == Element::Char && ident(last.c) && p < src_.size() &&
        ident(src_[p]))
      return false;
    end_ = p;
    return true;
  }

  bool space(std::size_t i, std::size_t p) {
    std::size_t q = p;
    while (q < hi_) {
      Region r = map_.region_at(q);
      if (r != Region::Comment && is_space(src_[q])) {
        ++q;
      } else if (r == Region::Comment && c_.multiline) {
        std::size_t e = unit_end_at(q);
        if (e > hi_) break;
        q = e;
      } else {
        break;
      }
    }
    // Zero-width whitespace may not glue two words together.
    if (q == p && p > 0 && p < src_.size() && ident(src_[p - 1]) &&
        ident(src_[p]))
      return false;
    return step(i + 1, q);
  }

  // Candidate ends for $x / $x?, shortest first. Units are maximal
  // identifiers, balanced groups and string literals joined without
  // whitespace. A leading hole must begin with an identifier and may not
  // contain operator characters; other holes may (e.g. `*T`, `!void`).
  std::vector<std::size_t> expression_ends(std::size_t p, bool leading) const {
    std::vector<std::size_t> ends;
    if (p >= hi_) return ends;
    if (p > 0 && ident(src_[p - 1]) && ident(src_[p])) return ends;
    const auto& lang = map_.language();
    std::size_t q = p;
    while (q < hi_) {
      Region r = map_.region_at(q);
      if (r == Region::StringDelimiter && opens_at(q)) {
        if (leading && q == p) break;
        std::size_t e = unit_end_at(q);
        if (e > hi_) break;
        q = e;
      } else if (r != Region::Code) {
        break;
      } else {
        char c = src_[q];
        if (is_space(c) || lang.is_close(c)) break;
        if (ident(c)) {
          std::size_t e = identifier_end(q);
          bool dots_only = true;
          for (std::size_t k = q; k < e; ++k) dots_only &= src_[k] == '.';
          if (!dots_only) {
            if (e < src_.size() && e == hi_ && ident(src_[e])) break;
            q = e;
            ends.push_back(q);
            continue;
          }
          if (leading && q == p) break;
          q = e;
        } else if (lang.is_open(c)) {
          if (leading && q == p) break;
          auto close = map_.partner(q);
          if (!close || *close >= hi_) break;
          q = *close + 1;
        } else {
          if (leading || c == ',' || c == ';') break;
          ++q;
        }
      }
      ends.push_back(q);
    }
    return ends;
  }

  // Candidate ends for $x* / ..., shortest first: every unit boundary at
  // depth zero up to the first unmatched close.
  std::vector<std::size_t> everything_ends(std::size_t p) const {
    std::vector<std::size_t> ends{p};
    const auto& lang = map_.language();
    std::size_t q = p;
    while (q < hi_) {
      Region r = map_.region_at(q);
      if (r == Region::Comment ||
          (r == Region::StringDelimiter && opens_at(q))) {
        std::size_t e = unit_end_at(q);
        if (e > hi_) break;
        q = e;
      } else if (r != Region::Code) {
        break;
      } else if (lang.is_open(src_[q])) {
        auto close = map_.partner(q);
        if (!close || *close >= hi_) break;
        q = *close + 1;
      } else if (lang.is_close(src_[q])) {
        break;
      } else {
        ++q;
      }
      ends.push_back(q);
    }
    return ends;
  }

  std::optional<std::size_t> string_body_end(std::size_t p) const {
    if (p >= src_.size()) return std::nullopt;
    std::size_t idx = map_.region_index(p);
    const auto& regions = map_.regions();
    const RegionSpan& r = regions[idx];
    if (r.kind == Region::StringBody && r.begin == p && r.end <= hi_)
      return r.end;
    if (r.kind == Region::StringDelimiter && !r.opens && r.begin == p &&
        idx > 0 && regions[idx - 1].kind == Region::StringDelimiter &&
        regions[idx - 1].opens)
      return p;
    return std::nullopt;
  }

  const Compiled& c_;
  const SourceMap& map_;
  std::string_view src_;
  std::size_t lo_, hi_;
  std::size_t start_ = 0, end_ = 0;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> slots_;
};

}  // namespace

std::vector<std::string> Template::hole_names() const {
  std::vector<std::string> out;
  for (const auto& atom : atoms)
    if (const auto* h = std::get_if<Hole>(&atom);
        h && h->kind != HoleKind::Anonymous)
      out.push_back(h->name);
  return out;
}

Template parse_template(std::string_view text) {
  Template t;
  std::string lit;
  std::set<std::string, std::less<>> names;
  auto flush = [&] {
    if (!lit.empty()) t.atoms.emplace_back(Literal{std::move(lit)});
    lit.clear();
  };
  auto add_hole = [&](std::string name, HoleKind kind) {
    if (!names.insert(name).second) throw DuplicateHoleName(name);
    flush();
    t.atoms.emplace_back(Hole{std::move(name), kind});
  };
  auto read_name = [&](std::size_t at) {
    std::size_t e = at;
    while (e < text.size() && is_name_char(text[e])) ++e;
    return e;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, 3) == "...") {
      flush();
      t.atoms.emplace_back(Hole{"", HoleKind::Anonymous});
      i += 3;
      continue;
    }
    // "$name" binds a string body.
    if (text[i] == '"' && i + 2 < text.size() && text[i + 1] == '$' &&
        is_name_start(text[i + 2])) {
      std::size_t e = read_name(i + 2);
      if (e < text.size() && text[e] == '"') {
        lit += '"';
        add_hole(std::string(text.substr(i + 2, e - i - 2)),
                 HoleKind::StringBody);
        lit += '"';
        i = e + 1;
        continue;
      }
    }
    if (text[i] == '$') {
      if (i + 1 >= text.size() || !is_name_start(text[i + 1]))
        throw MalformedHole(i, "'$' must be followed by an identifier");
      std::size_t e = read_name(i + 1);
      std::string name(text.substr(i + 1, e - i - 1));
      HoleKind kind = HoleKind::Expression;
      if (e < text.size() && text[e] == '*') {
        kind = HoleKind::Everything;
        ++e;
      } else if (e < text.size() && text[e] == '?') {
        kind = HoleKind::Optional;
        ++e;
      }
      add_hole(std::move(name), kind);
      i = e;
      continue;
    }
    lit += text[i++];
  }
  flush();
  return t;
}

const Binding* MatchEnvironment::find(std::string_view name) const {
  auto it = bindings.find(name);
  return it == bindings.end() ? nullptr : &it->second;
}

const Binding& MatchEnvironment::at(std::string_view name) const {
  if (const auto* b = find(name)) return *b;
  throw UnboundHole(std::string(name));
}

std::vector<Match> match_all(const Template& t, const SourceMap& map) {
  return match_all(t, map, 0, map.size());
}

std::vector<Match> match_all(const Template& t, const SourceMap& map,
                             std::size_t begin, std::size_t end,
                             const MatchFilter& accept) {
  std::vector<Match> out;
  Compiled compiled = compile(t);
  if (compiled.elements.empty()) return out;
  end = std::min(end, map.size());
  Matcher matcher(compiled, map, begin, end);
  std::size_t p = begin;
  while (p < end) {
    if (matcher.can_start_at(p)) {
      if (auto m = matcher.try_at(p); m && (!accept || accept(*m))) {
        p = m->end;
        out.push_back(std::move(*m));
        continue;
      }
    }
    ++p;
  }
  return out;
}

Constant get_property(const MatchEnvironment& env, std::string_view name,
                      Property prop) {
  const Binding& b = env.at(name);
  switch (prop) {
    case Property::Value:
      return b.text;
    case Property::Line:
      return static_cast<std::int64_t>(b.line);
    case Property::Column:
      return static_cast<std::int64_t>(b.column);
  }
  return b.text;
}

}  // namespace factlog
