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

#include "factlog/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "factlog/analyses.hpp"
#include "factlog/datalog.hpp"
#include "factlog/error.hpp"
#include "factlog/rewrite.hpp"

namespace fs = std::filesystem;

namespace factlog {
namespace {

/// Failure that maps directly to an exit code.
struct Exit {
  int code;
  std::string message;
};

struct Options {
  std::vector<std::string> inputs;
  std::string preset;
  std::string lang;
  std::vector<std::string> specs;
  std::string program;
  std::vector<std::string> edb;
  std::string format = "dl";
  std::string out;
  unsigned jobs = 0;
  std::string query;
  std::string templ;
  std::string relation = "edge";
  bool closure = false;
  bool json = false;
  std::string lang_config;
  LanguageRegistry languages = LanguageRegistry::builtin();
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

unsigned job_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Exit{kExitInput, "cannot write " + path.string()};
  f << text;
}

/// A preset, or an ad-hoc analysis assembled from --lang/--spec/--program.
AnalysisPreset resolve_analysis(const Options& o, bool need_program) {
  AnalysisPreset p;
  if (!o.preset.empty()) {
    p = load_preset(o.preset);
  } else {
    if (o.lang.empty() && o.specs.empty() && o.program.empty())
      throw Exit{kExitUsage, "either --preset or --lang with --spec is required"};
    p.name = "custom";
    p.language = o.lang;
    for (const auto& s : o.specs) {
      auto spec = parse_fact_spec(read_file(s), fs::path(s).stem().string());
      if (p.language.empty()) p.language = spec.language;
      if (spec.language != p.language)
        throw ConfigError(s + " targets language '" + spec.language +
                          "', expected '" + p.language + "'");
      p.function_specs.push_back(spec.name);
      p.fact_specs.push_back(std::move(spec));
    }
  }
  if (!o.program.empty()) p.program = parse_program(read_file(o.program));
  if (need_program && p.program.relations.empty() && p.program.rules.empty())
    throw Exit{kExitUsage, "no Datalog program: use --preset or --program"};
  return p;
}

std::vector<SourceFile> sources(const Options& o, const AnalysisPreset& p) {
  if (p.language.empty())
    throw Exit{kExitUsage, "a language is required: use --preset or --lang"};
  return collect_sources(o.inputs, o.languages.get(p.language));
}

void report(std::ostream& err, const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    err << d.file << ':' << d.line << ": warning: " << d.message << '\n';
}

std::string summary(const RunStats& s) {
  return "files=" + std::to_string(s.files) + " kloc=" + fixed(s.kloc, 3) +
         " facts=" + std::to_string(s.fact_count) +
         " functions=" + std::to_string(s.function_count) +
         " methods=" + std::to_string(s.method_count) +
         " elapsed=" + fixed(s.elapsed_seconds, 3) + "s";
}

std::vector<ColumnType> column_types(const DatalogProgram& prog,
                                     const std::string& rel,
                                     std::string_view first_line) {
  if (auto it = prog.relations.find(rel); it != prog.relations.end())
    return it->second.types;
  std::size_t cols = first_line.empty()
                         ? 0
                         : std::count(first_line.begin(), first_line.end(), '\t') + 1;
  return std::vector<ColumnType>(cols, ColumnType::Unknown);
}

void load_edb_file(Database& db, const DatalogProgram& prog,
                   const fs::path& file) {
  std::string text = read_file(file);
  if (file.extension() == ".facts" || file.extension() == ".tsv") {
    std::string rel = file.stem().string();
    auto types = column_types(prog, rel, text.substr(0, text.find('\n')));
    db.load_tsv(rel, text, types);
  } else {
    FactSet facts = parse_fact_text(text);
    for (const auto& f : facts.facts()) db.insert(f);
  }
}

/// EDB from --edb paths plus facts generated from positional inputs.
Database load_edb(const Options& o, const AnalysisPreset& p,
                  std::ostream& err, RunStats* stats) {
  Database db;
  for (const auto& raw : o.edb) {
    fs::path path(raw);
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(path)) {
        auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".facts" || ext == ".dl"))
          files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) load_edb_file(db, p.program, f);
    } else if (fs::exists(path)) {
      load_edb_file(db, p.program, path);
    } else {
      throw Exit{kExitInput, "no such fact file or directory: " + raw};
    }
  }
  if (!o.inputs.empty()) {
    auto files = sources(o, p);
    if (files.empty()) throw Exit{kExitInput, "no input files found"};
    auto run = generate_preset_facts(p, files, job_count(o.jobs), o.languages);
    report(err, run.generation.diagnostics);
    for (const auto& f : run.generation.facts.facts()) db.insert(f);
    if (stats) *stats = run.stats;
  } else if (o.edb.empty()) {
    throw Exit{kExitUsage, "no inputs: give source paths or --edb"};
  }
  return db;
}

std::vector<std::string> output_relations(const AnalysisPreset& p) {
  if (!p.program.outputs.empty()) return p.program.outputs;
  if (!p.primary_output.empty()) return {p.primary_output};
  auto idb = p.program.idb();
  return {idb.begin(), idb.end()};
}

std::string format_cell(const Constant& c) {
  if (const auto* n = std::get_if<std::int64_t>(&c)) return std::to_string(*n);
  return escape_tsv(std::get<std::string>(c));
}

std::string dot_quote(const Constant& c) {
  std::string s = format_cell(c), out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

// --- commands ---------------------------------------------------------------

int cmd_facts(const Options& o, std::ostream& out, std::ostream& err) {
  auto p = resolve_analysis(o, false);
  if (p.fact_specs.empty())
    throw Exit{kExitUsage, "no fact specs: use --preset or --spec"};
  auto files = sources(o, p);
  if (files.empty()) throw Exit{kExitInput, "no input files found"};
  auto start = std::chrono::steady_clock::now();
  auto run = generate_preset_facts(p, files, job_count(o.jobs), o.languages);
  report(err, run.generation.diagnostics);
  const FactSet& facts = run.generation.facts;
  if (p.fact_relations.empty()) {  // ad-hoc specs: every relation counts
    for (auto& f : run.generation.files)
      for (auto& [rel, n] : f.unique_facts) run.stats.fact_count += n;
  }

  if (o.format == "tsv") {
    if (o.out.empty()) throw Exit{kExitUsage, "--format tsv requires --out"};
    std::set<std::string> rels(p.fact_relations.begin(), p.fact_relations.end());
    for (const auto& r : facts.relations()) rels.insert(r);
    for (const auto& r : rels)
      write_text(fs::path(o.out) / (r + ".facts"), facts.to_tsv(r));
  } else if (o.out.empty()) {
    out << facts.to_datalog();
  } else {
    write_text(fs::path(o.out) / "facts.dl", facts.to_datalog());
  }
  run.stats.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  err << summary(run.stats) << '\n';
  return kExitOk;
}

Database solve_db(const Options& o, const AnalysisPreset& p, std::ostream& err) {
  Database edb = load_edb(o, p, err, nullptr);
  return evaluate(p.program, edb);
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  auto p = resolve_analysis(o, true);
  Database db = solve_db(o, p, err);
  auto rels = output_relations(p);
  if (o.format == "tsv") {
    if (o.out.empty()) throw Exit{kExitUsage, "--format tsv requires --out"};
    for (const auto& r : rels)
      write_text(fs::path(o.out) / (r + ".csv"), db.to_tsv(r));
  } else if (o.out.empty()) {
    out << db.to_datalog(rels);
  } else {
    write_text(fs::path(o.out) / "results.dl", db.to_datalog(rels));
  }
  for (const auto& r : rels)
    err << r << ": " << (db.find(r) ? db.find(r)->size() : 0) << " tuples\n";
  return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
  Atom pattern;
  try {
    pattern = parse_atom(o.query);
  } catch (const DatalogSyntaxError& e) {
    throw Exit{kExitUsage, std::string("bad query: ") + e.what()};
  }
  auto p = resolve_analysis(o, true);
  Database db = solve_db(o, p, err);
  auto rows = query(db, pattern);
  if (query_variables(pattern).empty()) {
    out << (rows.empty() ? "false" : "true") << '\n';
    return kExitOk;
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "\t" : "") << format_cell(row[i]);
    out << '\n';
  }
  return kExitOk;
}

int cmd_graph(const Options& o, std::ostream& out, std::ostream& err) {
  auto p = resolve_analysis(o, o.closure);
  Database db;
  if (o.closure) {
    db = solve_db(o, p, err);
  } else {
    db = load_edb(o, p, err, nullptr);
  }
  std::string rel = o.closure ? (p.primary_output.empty() ? "calls" : p.primary_output)
                              : o.relation;
  const Relation* r = db.find(rel);
  if (!r && !o.edb.empty() && o.inputs.empty())
    throw Exit{kExitAnalysis, "no relation '" + rel + "' in the fact inputs"};
  if (r && r->arity() != 2)
    throw Exit{kExitAnalysis, "relation '" + rel + "' is not binary"};
  std::string text = "digraph " + rel + " {\n";
  for (const auto& t : db.tuples(rel))
    text += "  " + dot_quote(t[0]) + " -> " + dot_quote(t[1]) + ";\n";
  text += "}\n";
  if (o.out.empty()) out << text;
  else write_text(o.out, text);
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  auto p = resolve_analysis(o, false);
  if (o.inputs.empty()) throw Exit{kExitUsage, "bench needs at least one corpus path"};
  const auto& lang = o.languages.get(p.language);
  nlohmann::json rows = nlohmann::json::array();
  std::string table =
      "corpus\tfiles\tkloc\tfacts\tfunctions\tmethods\telapsed_s\t"
      "facts_per_function\tkloc_per_min\n";
  for (const auto& corpus : o.inputs) {
    std::vector<std::string> one{corpus};
    auto files = collect_sources(one, lang);
    if (files.empty()) continue;
    auto start = std::chrono::steady_clock::now();
    auto run = generate_preset_facts(p, files, job_count(o.jobs), o.languages);
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report(err, run.generation.diagnostics);
    const auto& s = run.stats;
    double rate = elapsed > 0 ? s.kloc / (elapsed / 60.0) : 0.0;
    nlohmann::json row = {{"corpus", corpus},
                          {"files", s.files},
                          {"kloc", s.kloc},
                          {"fact_count", s.fact_count},
                          {"function_count", s.function_count},
                          {"method_count", s.method_count},
                          {"elapsed_seconds", elapsed},
                          {"kloc_per_minute", rate}};
    row["facts_per_function"] = s.facts_per_function
                                    ? nlohmann::json(*s.facts_per_function)
                                    : nlohmann::json(nullptr);
    rows.push_back(row);
    table += corpus + '\t' + std::to_string(s.files) + '\t' + fixed(s.kloc, 3) +
             '\t' + std::to_string(s.fact_count) + '\t' +
             std::to_string(s.function_count) + '\t' +
             std::to_string(s.method_count) + '\t' + fixed(elapsed, 3) + '\t' +
             (s.facts_per_function ? fixed(*s.facts_per_function, 2) : "-") +
             '\t' + fixed(rate, 1) + '\n';
  }
  if (o.json) out << rows.dump(2) << '\n';
  else out << table;
  return kExitOk;
}

int cmd_match(const Options& o, std::ostream& out, std::ostream&) {
  if (o.lang.empty() || o.templ.empty())
    throw Exit{kExitUsage, "match needs --lang and --template"};
  const auto& lang = o.languages.get(o.lang);
  Template t = parse_template(o.templ);
  auto files = collect_sources(o.inputs, lang);
  if (files.empty()) throw Exit{kExitInput, "no input files found"};
  for (const auto& f : files) {
    SourceMap map(read_file(f.path), lang);
    for (const auto& m : match_all(t, map)) {
      auto pos = map.position(m.begin);
      nlohmann::ordered_json rec = {
          {"file", f.path},
          {"line", pos.line},
          {"column", pos.column},
          {"text", std::string(map.source().substr(m.begin, m.end - m.begin))}};
      nlohmann::ordered_json env = nlohmann::ordered_json::object();
      for (const auto& [name, b] : m.env.bindings)
        env[name] = {{"text", b.text}, {"line", b.line}, {"column", b.column}};
      rec["bindings"] = env;
      out << rec.dump() << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"factlog: declarative fact generation and Datalog solving"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool positional = true) {
    if (positional) sub->add_option("inputs", o.inputs, "Source files or directories");
    sub->add_option("--preset", o.preset, "Bundled analysis (see FACTLOG_PRESETS)");
    sub->add_option("--lang", o.lang, "Source language");
    sub->add_option("--spec", o.specs, "Fact spec file (repeatable)")
        ->allow_extra_args(false);
    sub->add_option("--jobs,-j", o.jobs, "Parallel file workers (0 = all cores)");
    sub->add_option("--lang-config", o.lang_config,
                    "Extra language definitions (plain-text config)");
  };
  auto io = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"dl", "tsv"}));
    sub->add_option("--out,-o", o.out, "Output directory");
  };
  auto solving = [&](CLI::App* sub) {
    sub->add_option("--program", o.program, "Datalog program (overrides the preset's)");
    sub->add_option("--edb", o.edb, "Fact file or directory (.dl or .facts)")
        ->allow_extra_args(false);
  };

  auto* facts = app.add_subcommand("facts", "Generate facts from source files");
  common(facts);
  io(facts);
  auto* solve = app.add_subcommand("solve", "Evaluate the Datalog program");
  common(solve);
  io(solve);
  solving(solve);
  auto* q = app.add_subcommand("query", "Print the tuples matching an atom");
  common(q);
  solving(q);
  q->add_option("--query,-q", o.query, "Atom such as calls(\"main\", X)")->required();
  auto* graph = app.add_subcommand("graph", "Write the call graph as dot text");
  common(graph);
  solving(graph);
  graph->add_option("--out,-o", o.out, "Output file");
  graph->add_option("--relation", o.relation, "Binary relation to draw");
  graph->add_flag("--closure", o.closure, "Draw the transitive closure");
  auto* bench = app.add_subcommand("bench", "Fact generation statistics per corpus");
  common(bench);
  bench->add_flag("--json", o.json, "JSON output");
  auto* match = app.add_subcommand("match", "Print template matches as JSON lines");
  common(match);
  match->add_option("--template,-t", o.templ, "Match template")->required();

  std::vector<std::string> argv_store{"factlog"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!o.lang_config.empty()) o.languages.load_config(read_file(o.lang_config));
    auto* sub = app.get_subcommands().front();
    std::string name = sub->get_name();
    if (name == "facts") return cmd_facts(o, out, err);
    if (name == "solve") return cmd_solve(o, out, err);
    if (name == "query") return cmd_query(o, out, err);
    if (name == "graph") return cmd_graph(o, out, err);
    if (name == "bench") return cmd_bench(o, out, err);
    return cmd_match(o, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const MalformedFact& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const MalformedHole& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DuplicateHoleName& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace factlog
