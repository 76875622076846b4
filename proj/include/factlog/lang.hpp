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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factlog {

/// Lexical profile of a target language. Only what region classification and
/// balanced matching need: comment and string syntax, bracket pairs, and the
/// identifier character class.
struct LanguageDefinition {
  struct BlockComment {
    std::string open, close;
  };
  struct StringSyntax {
    std::string open, close;
    char escape = '\0';  // '\0' means no escape character
  };
  struct Pair {
    char open, close;
  };

  std::string name;
  std::vector<std::string> extensions;
  std::vector<std::string> line_comments;
  std::vector<BlockComment> block_comments;
  bool nested_comments = false;
  std::vector<StringSyntax> strings;
  std::vector<Pair> balanced = {{'(', ')'}, {'[', ']'}, {'{', '}'}};
  // Added to [A-Za-z0-9].
  std::string identifier_extra = "_.";

  bool is_identifier_char(char c) const;
  bool is_open(char c) const;
  bool is_close(char c) const;
  std::optional<char> close_for(char open) const;

  /// Throws ConfigError when delimiter lists are ambiguous or a pair has equal
  /// open and close characters.
  void validate() const;
};

/// Parses the plain-text language configuration format:
///
///   [name]
///   extensions = .go
///   line_comment = //
///   block_comment = /* */
///   string = ` ` none
///   balanced = () [] {}
///   identifier_extra = _.
///   nested_comments = false
///
/// Repeated keys append. Blank lines and lines starting with '#' are skipped.
std::vector<LanguageDefinition> parse_language_config(std::string_view text);

class LanguageRegistry {
 public:
  /// Registry holding the bundled go, c, zig and arith definitions.
  static const LanguageRegistry& builtin();

  void add(LanguageDefinition lang);
  void load_config(std::string_view text);

  const LanguageDefinition& get(std::string_view name) const;
  const LanguageDefinition* find(std::string_view name) const;
  const LanguageDefinition* find_by_extension(std::string_view ext) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, LanguageDefinition, std::less<>> langs_;
};

enum class Region : std::uint8_t { Code, Comment, StringBody, StringDelimiter };

struct RegionSpan {
  Region kind;
  std::size_t begin, end;
  // For comments and opening string delimiters: one past the whole comment or
  // string literal. Equal to `end` otherwise.
  std::size_t unit_end;
  bool opens = false;  // opening string delimiter
};

struct Position {
  std::size_t line;    // 1-based
  std::size_t column;  // 1-based, in bytes
};

struct Diagnostic {
  std::string file;
  std::size_t line = 0;
  std::string message;
};

/// Source text classified into code, comment and string regions, with a line
/// index and precomputed bracket partners.
class SourceMap {
 public:
  SourceMap() = default;
  SourceMap(std::string source, const LanguageDefinition& lang);

  std::string_view source() const { return source_; }
  std::size_t size() const { return source_.size(); }
  const LanguageDefinition& language() const { return lang_; }

  Region region_at(std::size_t offset) const { return kinds_[offset]; }
  const std::vector<RegionSpan>& regions() const { return regions_; }
  /// Index into regions() of the span containing offset.
  std::size_t region_index(std::size_t offset) const;

  Position position(std::size_t offset) const;
  std::size_t line_of(std::size_t offset) const {
    return position(offset).line;
  }
  /// Number of newline bytes.
  std::size_t newline_count() const { return newlines_; }

  /// Offset of the close character matching the open character at `offset`,
  /// or nullopt when it has none or `offset` is not a code open character.
  std::optional<std::size_t> partner(std::size_t offset) const;

  const std::vector<Diagnostic>& warnings() const { return warnings_; }

 private:
  void scan();
  void pair_brackets();

  std::string source_;
  LanguageDefinition lang_;
  std::vector<Region> kinds_;
  std::vector<RegionSpan> regions_;
  std::vector<std::uint32_t> partner_;
  std::vector<std::size_t> line_starts_;
  std::size_t newlines_ = 0;
  std::vector<Diagnostic> warnings_;
};

inline SourceMap classify(std::string source, const LanguageDefinition& lang) {
  return SourceMap(std::move(source), lang);
}

/// One past the close character matching the open character at `start`.
/// Throws UnbalancedInput when the input ends (or a mismatched close appears)
/// before depth returns to zero.
std::size_t scan_balanced(const SourceMap& map, std::size_t start);

}  // namespace factlog
