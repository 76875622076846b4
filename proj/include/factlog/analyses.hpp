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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factlog/datalog.hpp"
#include "factlog/rewrite.hpp"

namespace factlog {

/// A bundled analysis: fact specs for one language plus the Datalog program
/// that consumes their facts. Loaded from `<root>/<name>/preset.conf`:
///
///   language = go
///   program = ../common/callgraph.dl
///   specs = func.spec
///   primary = calls
///   fact_relations = edge
///   function_specs = func.spec
///   method_specs =
///
/// Paths are relative to the preset directory.
struct AnalysisPreset {
  std::string name;
  std::string language;
  std::vector<FactSpec> fact_specs;
  DatalogProgram program;
  std::string primary_output;
  std::vector<std::string> fact_relations;  // counted as facts in RunStats
  std::vector<std::string> function_specs;  // spec names counted as functions
  std::vector<std::string> method_specs;
};

/// $FACTLOG_PRESETS when set, else the directory bundled at build time.
std::filesystem::path preset_root();

/// Subdirectories of `root` holding a preset.conf, sorted.
std::vector<std::string> list_presets(const std::filesystem::path& root);
std::vector<std::string> list_presets();

/// Throws ConfigError for a missing or inconsistent preset and
/// DatalogSyntaxError (and friends) for a bad program.
AnalysisPreset load_preset(std::string_view name,
                           const std::filesystem::path& root);
AnalysisPreset load_preset(std::string_view name);
AnalysisPreset load_preset_dir(const std::filesystem::path& dir);

struct RunStats {
  std::size_t files = 0;
  std::size_t newlines = 0;
  double kloc = 0;  // newlines / 1000
  std::size_t fact_count = 0;  // per-file unique facts, summed
  std::size_t function_count = 0;
  std::size_t method_count = 0;
  double elapsed_seconds = 0;
  std::optional<double> facts_per_function;
};

struct AnalysisRun {
  GenerationResult generation;
  Database edb;
  Database db;  // least model: EDB plus derived relations
  RunStats stats;
};

/// Fact generation over every spec, then evaluation of the program.
AnalysisRun run_analysis(
    const AnalysisPreset& preset, std::span<const SourceFile> files,
    unsigned jobs = 1,
    const LanguageRegistry& languages = LanguageRegistry::builtin());

/// Only the fact generation half, with stats; no evaluation.
AnalysisRun generate_preset_facts(
    const AnalysisPreset& preset, std::span<const SourceFile> files,
    unsigned jobs = 1,
    const LanguageRegistry& languages = LanguageRegistry::builtin());

/// Expands directories recursively, keeping files whose extension belongs
/// to `lang`; explicitly named files are always kept. The result is sorted
/// and free of duplicates. Throws ConfigError for a path that does not exist.
std::vector<SourceFile> collect_sources(std::span<const std::string> paths,
                                        const LanguageDefinition& lang);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace factlog
