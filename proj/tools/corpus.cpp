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

#include "corpus.hpp"

#include <fstream>
#include <random>

namespace factlog::corpus {
namespace {

const char* const kLibrary[] = {"printf", "memcpy", "strlen", "abs", "MAX"};

class Writer {
 public:
  Writer(std::mt19937_64& rng, CorpusFile& file, std::size_t file_index)
      : rng_(rng), file_(file), index_(file_index) {}

  std::string name(std::size_t fn) const {
    return "fn_" + std::to_string(index_) + "_" + std::to_string(fn);
  }

  void header(std::size_t count) {
    out_ += "/* generated unit " + std::to_string(index_) + " */\n";
    out_ += "#include <stdio.h>\n#include <stdlib.h>\n#include <string.h>\n\n";
    out_ += "#define MAX(a, b) ((a) > (b) ? (a) : (b))\n\n";
    out_ += "struct pair {\n    int left;\n    int right;\n};\n\n";
    for (std::size_t i = 0; i < count; ++i)
      out_ += "int " + name(i) + "(int a, int b);\n";
    out_ += '\n';
  }

  void function(std::size_t fn, std::size_t count) {
    std::string self = name(fn);
    auto pick = [&] {
      if (rng_() % 4 == 0) return std::string(kLibrary[rng_() % 5]);
      return name(rng_() % count);
    };
    auto call = [&](const std::string& args) {
      std::string callee = pick();
      file_.edges.insert({self, callee});
      return callee + "(" + args + ")";
    };
    out_ += "int " + self + "(int a, int b)\n{\n";
    out_ += "    /* not a call: " + name(rng_() % count) + "(a, b) */\n";
    out_ += "    int x = (int)sizeof(struct pair) + a;\n";
    out_ += "    const char *note = \"decoy " + name(rng_() % count) +
            "(x)\";\n";
    out_ += "    if (x > b) {\n";
    std::string inner = call("b, 1");
    out_ += "        x = " + call("x, " + inner) + ";\n";
    out_ += "    }\n";
    out_ += "    while (x > 1000) {\n        x = x / 2;\n    }\n";
    out_ += "    for (int i = 0; i < 3; i++) {\n";
    out_ += "        x += " + call("i, a") + ";\n";
    out_ += "    }\n";
    out_ += "    switch (x & 3) {\n";
    out_ += "    case 1:\n        x = " + call("x, b") + ";\n        break;\n";
    out_ += "    default:\n        break;\n    }\n";
    out_ += "    // " + name(rng_() % count) + "(x, x) is commented out\n";
    out_ += "    (void)note;\n";
    out_ += "    return (x);\n}\n\n";
    ++file_.functions;
  }

  std::string take() { return std::move(out_); }

 private:
  std::mt19937_64& rng_;
  CorpusFile& file_;
  std::size_t index_;
  std::string out_;
};

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

std::size_t Corpus::function_count() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.functions;
  return n;
}

std::size_t Corpus::edge_count() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.edges.size();
  return n;
}

std::set<Edge> Corpus::all_edges() const {
  std::set<Edge> out;
  for (const auto& f : files) out.insert(f.edges.begin(), f.edges.end());
  return out;
}

Corpus generate_c_corpus(const CorpusOptions& options) {
  std::mt19937_64 rng(options.seed);
  Corpus corpus;
  const std::size_t per_file = std::max<std::size_t>(1, options.functions_per_file);
  while (corpus.lines < options.target_lines) {
    std::size_t index = corpus.files.size();
    CorpusFile file;
    char buf[32];
    std::snprintf(buf, sizeof buf, "unit_%03zu.c", index);
    file.name = buf;
    Writer w(rng, file, index);
    w.header(per_file);
    for (std::size_t fn = 0; fn < per_file; ++fn) w.function(fn, per_file);
    file.content = w.take();
    corpus.lines += count_lines(file.content);
    corpus.files.push_back(std::move(file));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : corpus.files) {
    std::ofstream out(dir / f.name, std::ios::binary);
    out << f.content;
  }
}

}  // namespace factlog::corpus
