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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace factlog::corpus {

using Edge = std::pair<std::string, std::string>;

struct CorpusFile {
  std::string name;  // relative path, e.g. "unit_007.c"
  std::string content;
  std::size_t functions = 0;
  std::set<Edge> edges;  // unique caller/callee pairs in this file
};

struct Corpus {
  std::vector<CorpusFile> files;
  std::size_t lines = 0;

  std::size_t function_count() const;
  std::size_t edge_count() const;  // per-file unique edges, summed
  std::set<Edge> all_edges() const;
};

struct CorpusOptions {
  std::uint64_t seed = 42;
  std::size_t target_lines = 100000;
  std::size_t functions_per_file = 40;
};

/// Deterministic C sources with known functions and call edges. Bodies mix
/// real calls (some nested in arguments) with decoys that must not count:
/// calls inside comments and string literals, sizeof, and control keywords.
Corpus generate_c_corpus(const CorpusOptions& options);

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace factlog::corpus
