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

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "corpus.hpp"
#include "factlog/analyses.hpp"
#include "factlog/cli.hpp"
#include "factlog/error.hpp"
#include "oracle.hpp"

using namespace factlog;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
using EdgeSet = std::set<std::pair<std::string, std::string>>;

fs::path root() { return fs::path(FACTLOG_SOURCE_DIR); }
std::string sample(const char* rel) { return (root() / "samples" / rel).string(); }

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << id << ' ' << title;
  if (!o.detail.empty()) std::cout << " (" << o.detail << ')';
  std::cout << std::endl;
}

std::vector<SourceFile> one_file(const std::string& path) {
  return {SourceFile{path, std::nullopt}};
}

EdgeSet pairs(const Database& db, const char* rel) {
  EdgeSet out;
  for (auto& t : db.tuples(rel))
    out.insert({std::get<std::string>(t[0]), std::get<std::string>(t[1])});
  return out;
}

EdgeSet read_edges_tsv(const fs::path& p) {
  EdgeSet out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    out.insert({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

// The published read/write/next facts for the four-line program.
Database published_liveness_facts() {
  Database db;
  auto add = [&](const char* rel, Constant a, Constant b) {
    std::vector<Constant> args{a, b};
    db.insert(rel, args);
  };
  using S = std::string;
  add("read", S("b"), 1); add("read", S("c"), 1); add("write", S("a"), 1); add("next", 1, 2);
  add("read", S("a"), 2); add("read", S("d"), 2); add("write", S("b"), 2); add("next", 2, 3);
  add("read", S("c"), 3); add("read", S("b"), 3); add("write", S("c"), 3); add("next", 3, 4);
  return db;
}

std::string join(const std::vector<ConstantTuple>& rows) {
  std::string s = "{";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) s += ",";
    s += format_constant(rows[i][0]);
  }
  return s + "}";
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

std::string cli_out(std::vector<std::string> args) {
  std::ostringstream out, err;
  if (run_cli(args, out, err) != kExitOk) throw std::runtime_error(err.str());
  return out.str();
}

// Every file below `dir`, path relative to it, mapped to its bytes.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  return out;
}

}  // namespace

int main() {
  const EdgeSet published_edges = {{"incr", "one"}, {"main", "fmt.Printf"},
                               {"main", "one"}, {"main", "incr"}};

  report("AC1", "worked Go example yields exactly the four listed edges", [&] {
    auto t = Clock::now();
    auto run = run_analysis(load_preset("callgraph-go"), one_file(sample("go/example.go")));
    double s = since(t);
    auto got = pairs(run.db, "edge");
    bool only_edges = run.generation.facts.size() == 4;
    return Outcome{got == published_edges && only_edges && s < 1.0,
                   std::to_string(got.size()) + " edges in " + std::to_string(s) + "s"};
  });

  report("AC2", "calls(\"main\", X) returns exactly {incr, one, fmt.Printf}", [&] {
    auto t = Clock::now();
    auto run = run_analysis(load_preset("callgraph-go"), one_file(sample("go/example.go")));
    auto rows = query(run.db, parse_atom("calls(\"main\", X)"));
    double s = since(t);
    std::set<std::string> got;
    for (auto& r : rows) got.insert(std::get<std::string>(r[0]));
    bool ok = got == std::set<std::string>{"incr", "one", "fmt.Printf"} &&
              rows.size() == 3 && s < 1.0;
    return Outcome{ok, join(rows) + " in " + std::to_string(s) + "s"};
  });

  report("AC3", "liveness facts for the four-line program equal the 12 published facts", [&] {
    auto run = run_analysis(load_preset("liveness-arith"), one_file(sample("arith/four_lines.arith")));
    Database want = published_liveness_facts();
    bool ok = true;
    std::size_t n = 0;
    for (const char* rel : {"read", "write", "next"}) {
      ok &= run.edb.tuples(rel) == want.tuples(rel);
      n += run.edb.tuples(rel).size();
    }
    ok &= run.generation.facts.size() == 12;
    return Outcome{ok, std::to_string(n) + " facts"};
  });

  report("AC4", "verbatim liveness rules match the naive fixpoint oracle", [&] {
    auto preset = load_preset("liveness-arith");
    Database edb = published_liveness_facts();
    Database db = evaluate(preset.program, edb);
    auto model = oracle::NaiveEvaluator(preset.program).run(oracle::model_of(edb));
    std::set<ConstantTuple> engine_live;
    for (auto& t : db.tuples("live")) engine_live.insert(t);
    bool ok = engine_live == model["live"];
    // Spot checks: the engine's answers must equal the oracle's.
    auto oracle_rows = [&](const std::function<bool(const ConstantTuple&)>& keep,
                           std::size_t col) {
      std::vector<ConstantTuple> out;
      for (const auto& t : model["live"])
        if (keep(t)) out.push_back({t[col]});
      std::sort(out.begin(), out.end(), tuple_less);
      return out;
    };
    auto b = query(db, parse_atom("live(\"b\", L)"));
    auto at2 = query(db, parse_atom("live(X, 2)"));
    auto ob = oracle_rows([](const ConstantTuple& t) { return t[0] == Constant{std::string("b")}; }, 1);
    auto o2 = oracle_rows([](const ConstantTuple& t) { return t[1] == Constant{std::int64_t{2}}; }, 0);
    ok &= b == ob && at2 == o2;
    return Outcome{ok, "live has " + std::to_string(engine_live.size()) +
                           " tuples; live(b,L)=" + join(b) + " live(X,2)=" + join(at2)};
  });

  report("AC5", "semi-naive evaluation equals naive oracle and graph search", [&] {
    std::mt19937 rng(20260101);
    int programs = 0, graphs = 0;
    bool ok = true;
    for (; programs < 200; ++programs) {
      auto rp = oracle::random_program(rng);
      auto p = parse_program(rp.text);
      auto got = oracle::model_of(evaluate(p, Database{}));
      auto want = oracle::NaiveEvaluator(p).run({});
      for (auto it = want.begin(); it != want.end();)
        it = it->second.empty() ? want.erase(it) : std::next(it);
      ok &= got == want;
    }
    auto calls = load_preset("callgraph-go").program;
    for (; graphs < 200; ++graphs) {
      EdgeSet es;
      int nodes = 1 + static_cast<int>(rng() % 20);
      int count = static_cast<int>(rng() % 45);
      Database db;
      for (int i = 0; i < count; ++i) {
        std::vector<Constant> e{"n" + std::to_string(rng() % nodes),
                                "n" + std::to_string(rng() % nodes)};
        es.insert({std::get<std::string>(e[0]), std::get<std::string>(e[1])});
        db.insert("edge", e);
      }
      ok &= pairs(evaluate(calls, db), "calls") == oracle::reachable(es);
    }
    return Outcome{ok, std::to_string(programs) + " programs, " +
                           std::to_string(graphs) + " edge sets"};
  });

  report("AC6", "negative self-cycle rejected; live stratified above its inputs", [&] {
    bool rejected = false;
    try {
      stratify(parse_program("p(X) :- q(X), !p(X)."));
    } catch (const UnstratifiableProgram&) {
      rejected = true;
    }
    auto strata = stratify(load_preset("liveness-arith").program);
    bool layered = strata == Strata{{"next", "read", "write"}, {"live"}};
    return Outcome{rejected && layered, rejected ? "" : "self-cycle accepted"};
  });

  report("AC7", "Go, C and Zig samples produce exactly the annotated edges", [&] {
    struct Case { const char* preset; const char* src; const char* truth; };
    bool ok = true;
    std::string detail;
    for (auto c : {Case{"callgraph-go", "go/example.go", "go/example.edges.tsv"},
                   Case{"callgraph-go-methods", "go/upgrade.go", "go/upgrade.edges.tsv"},
                   Case{"callgraph-c", "c/ring.c", "c/ring.edges.tsv"},
                   Case{"callgraph-zig", "zig/stack.zig", "zig/stack.edges.tsv"}}) {
      auto run = run_analysis(load_preset(c.preset), one_file(sample(c.src)));
      auto want = read_edges_tsv(sample(c.truth));
      bool same = pairs(run.db, "edge") == want;
      ok &= same;
      detail += std::string(detail.empty() ? "" : ", ") + c.src + " " +
                std::to_string(want.size()) + (same ? " ok" : " MISMATCH");
    }
    return Outcome{ok, detail};
  });

  report("AC8", "synthetic 100 KLOC C corpus generates facts within 60 s", [&] {
    corpus::CorpusOptions opts;
    auto corp = corpus::generate_c_corpus(opts);
    auto dir = fs::temp_directory_path() / "factlog_acceptance_corpus";
    fs::remove_all(dir);
    corpus::write_corpus(corp, dir);
    const auto& c = LanguageRegistry::builtin().get("c");
    std::vector<std::string> paths{dir.string()};
    auto t = Clock::now();
    auto files = collect_sources(paths, c);
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto run = generate_preset_facts(load_preset("callgraph-c"), files, jobs);
    double s = since(t);
    bool exact = pairs(run.edb, "edge") == corp.all_edges() &&
                 run.stats.function_count == corp.function_count() &&
                 run.stats.fact_count == corp.edge_count();
    fs::remove_all(dir);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.1f KLOC, %zu functions, %zu facts in %.2fs, %u jobs%s",
                  run.stats.kloc, run.stats.function_count, run.stats.fact_count, s,
                  jobs, exact ? "" : ", counts differ from generator");
    return Outcome{run.stats.kloc >= 100.0 && s <= 60.0 && exact, buf};
  });

  report("AC9", "two pipeline runs with different --jobs are byte-identical", [&] {
    auto base = fs::temp_directory_path() / "factlog_acceptance_determinism";
    fs::remove_all(base);
    struct Case { const char* preset; const char* dir; };
    const Case cases[] = {{"callgraph-go", "go"}, {"callgraph-go-methods", "go"},
                          {"callgraph-c", "c"}, {"callgraph-zig", "zig"},
                          {"liveness-arith", "arith"}, {"liveness-arith-classical", "arith"}};
    for (const char* jobs : {"1", "4"}) {
      for (auto c : cases) {
        auto out = base / jobs / c.preset;
        std::string src = sample(c.dir);
        if (cli({"facts", "--preset", c.preset, src, "--jobs", jobs, "--format", "tsv",
                 "--out", (out / "tsv").string()}) ||
            cli({"facts", "--preset", c.preset, src, "--jobs", jobs, "--out",
                 (out / "dl").string()}) ||
            cli({"solve", "--preset", c.preset, src, "--jobs", jobs, "--format", "tsv",
                 "--out", (out / "idb").string()}) ||
            cli({"solve", "--preset", c.preset, src, "--jobs", jobs, "--out",
                 (out / "idb").string()}) ||
            cli({"graph", "--preset", c.preset, src, "--jobs", jobs, "--relation",
                 c.preset[0] == 'c' ? "edge" : "next", "--out", (out / "graph.dot").string()}))
          return Outcome{false, std::string("command failed for ") + c.preset};
      }
    }
    auto a = snapshot(base / "1");
    auto b = snapshot(base / "4");
    fs::remove_all(base);
    return Outcome{a == b && !a.empty(), std::to_string(a.size()) + " files compared"};
  });

  report("AC10", "bench stats are sane and fact_count sums per-file unique facts", [&] {
    struct Case { const char* preset; const char* dir; };
    bool ok = true;
    std::string detail;
    for (auto c : {Case{"callgraph-go", "go"}, Case{"callgraph-go-methods", "go"},
                   Case{"callgraph-c", "c"}, Case{"callgraph-zig", "zig"},
                   Case{"liveness-arith", "arith"}}) {
      auto preset = load_preset(c.preset);
      const auto& lang = LanguageRegistry::builtin().get(preset.language);
      std::vector<std::string> paths{sample(c.dir)};
      auto files = collect_sources(paths, lang);
      auto run = generate_preset_facts(preset, files, 2);
      std::size_t per_file = 0;
      for (const auto& f : files) {
        auto single = generate_preset_facts(preset, std::vector<SourceFile>{f}, 1);
        for (const auto& rel : preset.fact_relations)
          per_file += single.generation.facts.count(rel);
      }
      auto json = cli_out({"bench", "--preset", c.preset, sample(c.dir), "--json"});
      bool reported = json.find("\"function_count\": " +
                                std::to_string(run.stats.function_count)) != std::string::npos &&
                      json.find("\"facts_per_function\": null") == std::string::npos;
      bool sane = run.stats.function_count > 0 && run.stats.facts_per_function &&
                  std::isfinite(*run.stats.facts_per_function) &&
                  run.stats.fact_count == per_file && reported;
      ok &= sane;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s%s %.2f", detail.empty() ? "" : ", ", c.preset,
                    run.stats.facts_per_function.value_or(NAN));
      detail += buf;
    }
    return Outcome{ok, detail};
  });

  return failures == 0 ? 0 : 1;
}
