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

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "factlog/analyses.hpp"
#include "factlog/error.hpp"
#include "oracle.hpp"

using namespace factlog;
namespace fs = std::filesystem;

namespace {

fs::path samples() { return fs::path(FACTLOG_SOURCE_DIR) / "samples"; }

std::vector<SourceFile> files_of(std::initializer_list<const char*> rel) {
  std::vector<SourceFile> out;
  for (auto r : rel) out.push_back({(samples() / r).string(), std::nullopt});
  return out;
}

std::set<std::pair<std::string, std::string>> pairs(const Database& db,
                                                    const char* rel) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto& t : db.tuples(rel))
    out.insert({std::get<std::string>(t[0]), std::get<std::string>(t[1])});
  return out;
}

}  // namespace

TEST_SUITE("analyses") {

TEST_CASE("bundled presets are listed") {
  auto names = list_presets();
  for (const char* n : {"callgraph-go", "callgraph-go-methods", "callgraph-c",
                        "callgraph-zig", "liveness-arith", "liveness-arith-classical"})
    CHECK(std::count(names.begin(), names.end(), n) == 1);
}

TEST_CASE("every preset loads and is self-consistent") {
  for (const auto& n : list_presets()) {
    CAPTURE(n);
    auto p = load_preset(n);
    CHECK(!p.fact_specs.empty());
    for (const auto& s : p.fact_specs) CHECK(s.language == p.language);
    CHECK(p.program.relations.count(p.primary_output));
    CHECK_NOTHROW(stratify(p.program));
  }
  CHECK_THROWS_AS(load_preset("no-such-preset"), ConfigError);
}

TEST_CASE("preset directory override through the environment") {
  fs::path dir = fs::temp_directory_path() / "factlog_presets_env";
  fs::remove_all(dir);
  fs::create_directories(dir / "tiny");
  std::ofstream(dir / "tiny" / "preset.conf")
      << "language = go\nprogram = p.dl\nspecs = s.spec\nprimary = r\n";
  std::ofstream(dir / "tiny" / "p.dl") << "r(X) :- f(X).\n";
  std::ofstream(dir / "tiny" / "s.spec")
      << "language = go\n[match]\nfunc $f(\n[rewrite]\nf(\"$f\").\n";
  setenv("FACTLOG_PRESETS", dir.c_str(), 1);
  CHECK(list_presets() == std::vector<std::string>{"tiny"});
  CHECK(load_preset("tiny").primary_output == "r");
  unsetenv("FACTLOG_PRESETS");
  CHECK(list_presets().size() >= 6);
}

TEST_CASE("inconsistent presets are rejected") {
  fs::path dir = fs::temp_directory_path() / "factlog_presets_bad";
  fs::remove_all(dir);
  fs::create_directories(dir / "mixed");
  std::ofstream(dir / "mixed" / "preset.conf")
      << "language = c\nprogram = p.dl\nspecs = s.spec\nprimary = r\n";
  std::ofstream(dir / "mixed" / "p.dl") << "r(X) :- f(X).\n";
  std::ofstream(dir / "mixed" / "s.spec")
      << "language = go\n[match]\nfunc $f(\n[rewrite]\nf(\"$f\").\n";
  CHECK_THROWS_AS(load_preset("mixed", dir), ConfigError);
  std::ofstream(dir / "mixed" / "s.spec", std::ios::trunc)
      << "language = c\n[match]\n$f(\n[rewrite]\nf(\"$f\").\n";
  std::ofstream(dir / "mixed" / "preset.conf", std::ios::trunc)
      << "language = c\nprogram = p.dl\nspecs = s.spec\nprimary = missing\n";
  CHECK_THROWS_AS(load_preset("mixed", dir), ConfigError);
}

TEST_CASE("call graph on the worked example") {
  auto run = run_analysis(load_preset("callgraph-go"), files_of({"go/example.go"}));
  CHECK(run.db.find("edge")->size() == 4);
  CHECK(run.db.find("calls")->size() == 4);
  CHECK(run.stats.function_count == 3);
  CHECK(run.stats.fact_count == 4);
  CHECK(run.stats.files == 1);
  CHECK(run.stats.kloc == doctest::Approx(0.015));
  REQUIRE(run.stats.facts_per_function);
  CHECK(*run.stats.facts_per_function == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("liveness on the four-line program") {
  auto run = run_analysis(load_preset("liveness-arith"), files_of({"arith/four_lines.arith"}));
  CHECK(run.edb.find("read")->size() + run.edb.find("write")->size() +
            run.edb.find("next")->size() == 12);
  CHECK(run.stats.fact_count == 12);
  CHECK(run.db.find("live")->size() == 13);
}

TEST_CASE("classical liveness differs from the forward rules") {
  auto fwd = run_analysis(load_preset("liveness-arith"), files_of({"arith/four_lines.arith"}));
  auto bwd = run_analysis(load_preset("liveness-arith-classical"), files_of({"arith/four_lines.arith"}));
  CHECK(fwd.edb.tuples("read") == bwd.edb.tuples("read"));
  CHECK(fwd.db.tuples("live") != bwd.db.tuples("live"));
  // Backward: d is read on line 2 and never written, so live at 1 and 2.
  auto d = query(bwd.db, parse_atom("live(\"d\", L)"));
  CHECK(d == std::vector<ConstantTuple>{{std::int64_t{1}}, {std::int64_t{2}}});
}

TEST_CASE("empty corpus") {
  auto run = run_analysis(load_preset("callgraph-c"), {});
  CHECK(run.stats.files == 0);
  CHECK(run.stats.fact_count == 0);
  CHECK(run.stats.function_count == 0);
  CHECK(run.stats.kloc == 0);
  CHECK(!run.stats.facts_per_function);
  CHECK(run.edb.relation_names().empty());
  CHECK(run.db.find("calls")->empty());
}

TEST_CASE("call closure matches reachability on every sample") {
  struct Case { const char* preset; const char* file; };
  for (auto c : {Case{"callgraph-go", "go/upgrade.go"},
                 Case{"callgraph-go-methods", "go/upgrade.go"},
                 Case{"callgraph-c", "c/ring.c"},
                 Case{"callgraph-zig", "zig/stack.zig"}}) {
    CAPTURE(c.file);
    auto run = run_analysis(load_preset(c.preset), files_of({c.file}));
    CHECK(pairs(run.db, "calls") == oracle::reachable(pairs(run.db, "edge")));
    for (const auto& [a, b] : pairs(run.db, "edge")) {
      CHECK(!a.empty());
      CHECK(!b.empty());
    }
    auto again = run_analysis(load_preset(c.preset), files_of({c.file}), 3);
    CHECK(again.db.tuples("calls") == run.db.tuples("calls"));
    CHECK(again.stats.fact_count == run.stats.fact_count);
  }
}

TEST_CASE("methods are counted separately") {
  auto base = run_analysis(load_preset("callgraph-go"), files_of({"go/upgrade.go"}));
  auto meth = run_analysis(load_preset("callgraph-go-methods"), files_of({"go/upgrade.go"}));
  CHECK(base.stats.method_count == 0);
  CHECK(meth.stats.method_count == 1);
  CHECK(meth.stats.function_count == base.stats.function_count);
  CHECK(meth.db.find("methodEdge")->size() == 3);
  CHECK(!base.db.find("methodEdge"));
}

TEST_CASE("collect_sources filters by extension and sorts") {
  const auto& go = LanguageRegistry::builtin().get("go");
  std::vector<std::string> paths{samples().string()};
  auto files = collect_sources(paths, go);
  REQUIRE(files.size() == 2);
  CHECK(files[0].path.ends_with("example.go"));
  CHECK(files[1].path.ends_with("upgrade.go"));
  std::vector<std::string> missing{"/nonexistent/dir"};
  CHECK_THROWS_AS(collect_sources(missing, go), ConfigError);
}

}
