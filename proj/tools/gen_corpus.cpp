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

// Writes the synthetic C corpus used for throughput measurements.

#include <CLI11.hpp>

#include <iostream>

#include "corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic C corpus with known call edges"};
  factlog::corpus::CorpusOptions opts;
  std::string out;
  app.add_option("--out,-o", out, "Output directory")->required();
  app.add_option("--lines", opts.target_lines, "Approximate line count");
  app.add_option("--seed", opts.seed, "Random seed");
  app.add_option("--functions-per-file", opts.functions_per_file,
                 "Functions per file");
  CLI11_PARSE(app, argc, argv);
  auto corpus = factlog::corpus::generate_c_corpus(opts);
  factlog::corpus::write_corpus(corpus, out);
  std::cout << "files=" << corpus.files.size() << " lines=" << corpus.lines
            << " functions=" << corpus.function_count()
            << " edges=" << corpus.edge_count() << '\n';
  return 0;
}
