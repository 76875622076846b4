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

#include "factlog/analyses.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "factlog/error.hpp"

#ifndef FACTLOG_DEFAULT_PRESET_DIR
#define FACTLOG_DEFAULT_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;

namespace factlog {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string spec_name(const std::string& file) {
  return fs::path(file).stem().string();
}

RunStats tally(const AnalysisPreset& preset, const GenerationResult& gen) {
  RunStats st;
  std::vector<std::size_t> fn_idx, method_idx;
  for (std::size_t i = 0; i < preset.fact_specs.size(); ++i) {
    const auto& n = preset.fact_specs[i].name;
    if (std::count(preset.function_specs.begin(), preset.function_specs.end(), n))
      fn_idx.push_back(i);
    if (std::count(preset.method_specs.begin(), preset.method_specs.end(), n))
      method_idx.push_back(i);
  }
  for (const auto& f : gen.files) {
    ++st.files;
    st.newlines += f.newlines;
    for (auto i : fn_idx) st.function_count += f.matches[i];
    for (auto i : method_idx) st.method_count += f.matches[i];
    for (const auto& rel : preset.fact_relations)
      if (auto it = f.unique_facts.find(rel); it != f.unique_facts.end())
        st.fact_count += it->second;
  }
  st.kloc = static_cast<double>(st.newlines) / 1000.0;
  if (st.function_count > 0)
    st.facts_per_function = static_cast<double>(st.fact_count) /
                            static_cast<double>(st.function_count);
  return st;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path preset_root() {
  if (const char* env = std::getenv("FACTLOG_PRESETS"); env && *env)
    return fs::path(env);
  return fs::path(FACTLOG_DEFAULT_PRESET_DIR);
}

std::vector<std::string> list_presets(const fs::path& root) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec))
    if (entry.is_directory() && fs::exists(entry.path() / "preset.conf"))
      out.push_back(entry.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> list_presets() { return list_presets(preset_root()); }

AnalysisPreset load_preset(std::string_view name, const fs::path& root) {
  fs::path dir = root / std::string(name);
  if (!fs::exists(dir / "preset.conf"))
    throw ConfigError("unknown preset '" + std::string(name) + "' under " +
                      root.string());
  return load_preset_dir(dir);
}

AnalysisPreset load_preset(std::string_view name) {
  return load_preset(name, preset_root());
}

AnalysisPreset load_preset_dir(const fs::path& dir) {
  std::map<std::string, std::string> keys;
  std::istringstream in{read_file(dir / "preset.conf")};
  for (std::string raw; std::getline(in, raw);) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(dir.string() + "/preset.conf: expected key = value");
    keys[std::string(trim(line.substr(0, eq)))] =
        std::string(trim(line.substr(eq + 1)));
  }
  static const std::set<std::string> known = {
      "language", "program", "specs", "primary",
      "fact_relations", "function_specs", "method_specs"};
  for (const auto& [k, v] : keys)
    if (!known.count(k))
      throw ConfigError(dir.string() + "/preset.conf: unknown key '" + k + "'");
  for (const char* k : {"language", "program", "specs", "primary"})
    if (keys[k].empty())
      throw ConfigError(dir.string() + "/preset.conf: missing '" + k + "'");

  AnalysisPreset p;
  p.name = dir.filename().string();
  p.language = keys["language"];
  p.primary_output = keys["primary"];
  p.fact_relations = words(keys["fact_relations"]);
  for (const auto& f : words(keys["function_specs"]))
    p.function_specs.push_back(spec_name(f));
  for (const auto& f : words(keys["method_specs"]))
    p.method_specs.push_back(spec_name(f));
  for (const auto& f : words(keys["specs"])) {
    FactSpec spec = parse_fact_spec(read_file(dir / f), spec_name(f));
    if (spec.language != p.language)
      throw ConfigError(f + " targets language '" + spec.language +
                        "', preset uses '" + p.language + "'");
    p.fact_specs.push_back(std::move(spec));
  }
  p.program = parse_program(read_file(dir / keys["program"]));
  if (!p.program.relations.count(p.primary_output))
    throw ConfigError("primary output '" + p.primary_output +
                      "' is not a relation of " + keys["program"]);
  for (const auto& r : p.fact_relations)
    if (!p.program.relations.count(r))
      throw ConfigError("fact relation '" + r + "' is not a relation of " +
                        keys["program"]);
  return p;
}

AnalysisRun generate_preset_facts(const AnalysisPreset& preset,
                                  std::span<const SourceFile> files,
                                  unsigned jobs,
                                  const LanguageRegistry& languages) {
  auto start = std::chrono::steady_clock::now();
  AnalysisRun run;
  GenerationOptions opts;
  opts.jobs = jobs;
  opts.languages = &languages;
  run.generation = generate_facts(preset.fact_specs, files, opts);
  run.edb = Database::from_facts(run.generation.facts);
  run.stats = tally(preset, run.generation);
  run.stats.elapsed_seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
  return run;
}

AnalysisRun run_analysis(const AnalysisPreset& preset,
                         std::span<const SourceFile> files, unsigned jobs,
                         const LanguageRegistry& languages) {
  auto start = std::chrono::steady_clock::now();
  AnalysisRun run = generate_preset_facts(preset, files, jobs, languages);
  run.db = evaluate(preset.program, run.edb);
  run.stats.elapsed_seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
  return run;
}

std::vector<SourceFile> collect_sources(std::span<const std::string> paths,
                                        const LanguageDefinition& lang) {
  std::set<std::string> found;
  auto wanted = [&](const fs::path& p) {
    auto ext = p.extension().string();
    return std::find(lang.extensions.begin(), lang.extensions.end(), ext) !=
           lang.extensions.end();
  };
  for (const auto& raw : paths) {
    fs::path p(raw);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (auto it = fs::recursive_directory_iterator(p, ec);
           it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_regular_file() && wanted(it->path()))
          found.insert(it->path().generic_string());
      }
    } else if (fs::exists(p, ec)) {
      found.insert(p.generic_string());
    } else {
      throw ConfigError("no such file or directory: " + raw);
    }
  }
  std::vector<SourceFile> out;
  for (const auto& f : found) out.push_back({f, std::nullopt});
  return out;
}

}  // namespace factlog
