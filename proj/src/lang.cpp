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

#include "factlog/lang.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "factlog/error.hpp"

namespace factlog {
namespace {

constexpr std::uint32_t kNoPartner = UINT32_MAX;

constexpr std::string_view kBuiltinLanguages = R"(
[go]
extensions = .go
line_comment = //
block_comment = /* */
string = " " \
string = ` ` none
string = ' ' \

[c]
extensions = .c .h
line_comment = //
block_comment = /* */
string = " " \
string = ' ' \

[zig]
extensions = .zig
line_comment = //
string = " " \
string = ' ' \
string = \\ \n none
identifier_extra = _.@

[arith]
extensions = .arith
identifier_extra = _
)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::string unescape_token(std::string_view tok) {
  if (tok == "\\n") return "\n";
  if (tok == "\\t") return "\t";
  return std::string(tok);
}

std::vector<std::string> tokens(std::string_view value) {
  std::vector<std::string> out;
  std::istringstream in{std::string(value)};
  std::string tok;
  while (in >> tok) out.push_back(unescape_token(tok));
  return out;
}

bool starts_with_at(std::string_view src, std::size_t pos,
                    std::string_view what) {
  return !what.empty() && src.substr(pos, what.size()) == what;
}

template <typename List, typename Get>
void check_prefix_free(const std::string& lang, const List& list, Get get,
                       const char* what) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (i == j) continue;
      std::string_view a = get(list[i]), b = get(list[j]);
      if (a.empty() || b.size() < a.size()) continue;
      if (b.substr(0, a.size()) == a)
        throw ConfigError(lang + ": " + what + " '" + std::string(a) +
                          "' is a prefix of '" + std::string(b) + "'");
    }
  }
}

}  // namespace

bool LanguageDefinition::is_identifier_char(char c) const {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || identifier_extra.find(c) != std::string::npos;
}

bool LanguageDefinition::is_open(char c) const {
  return std::any_of(balanced.begin(), balanced.end(),
                     [c](const Pair& p) { return p.open == c; });
}

bool LanguageDefinition::is_close(char c) const {
  return std::any_of(balanced.begin(), balanced.end(),
                     [c](const Pair& p) { return p.close == c; });
}

std::optional<char> LanguageDefinition::close_for(char open) const {
  for (const auto& p : balanced)
    if (p.open == open) return p.close;
  return std::nullopt;
}

void LanguageDefinition::validate() const {
  if (name.empty()) throw ConfigError("language without a name");
  check_prefix_free(name, line_comments,
                    [](const std::string& s) -> std::string_view { return s; },
                    "line comment");
  check_prefix_free(
      name, block_comments,
      [](const BlockComment& b) -> std::string_view { return b.open; },
      "block comment");
  check_prefix_free(
      name, strings,
      [](const StringSyntax& s) -> std::string_view { return s.open; },
      "string delimiter");
  for (const auto& b : block_comments)
    if (b.open.empty() || b.close.empty())
      throw ConfigError(name + ": empty block comment delimiter");
  for (const auto& s : strings)
    if (s.open.empty() || s.close.empty())
      throw ConfigError(name + ": empty string delimiter");
  for (const auto& p : balanced)
    if (p.open == p.close)
      throw ConfigError(name + ": balanced pair with identical characters '" +
                        std::string(1, p.open) + "'");
}

std::vector<LanguageDefinition> parse_language_config(std::string_view text) {
  std::vector<LanguageDefinition> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  bool balanced_seen = false;
  auto fail = [&](const std::string& why) {
    throw ConfigError("language config line " + std::to_string(lineno) + ": " +
                      why);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      out.emplace_back();
      out.back().name = std::string(trim(line.substr(1, line.size() - 2)));
      balanced_seen = false;
      continue;
    }
    if (out.empty()) fail("key outside of a [language] section");
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    std::string key(trim(line.substr(0, eq)));
    auto toks = tokens(line.substr(eq + 1));
    LanguageDefinition& lang = out.back();
    if (key == "extensions") {
      lang.extensions.insert(lang.extensions.end(), toks.begin(), toks.end());
    } else if (key == "line_comment") {
      if (toks.size() != 1) fail("line_comment takes one prefix");
      lang.line_comments.push_back(toks[0]);
    } else if (key == "block_comment") {
      if (toks.size() != 2) fail("block_comment takes open and close");
      lang.block_comments.push_back({toks[0], toks[1]});
    } else if (key == "string") {
      if (toks.size() < 2 || toks.size() > 3)
        fail("string takes open, close and an optional escape");
      char esc = '\0';
      if (toks.size() == 3 && toks[2] != "none") {
        if (toks[2].size() != 1) fail("escape must be one character");
        esc = toks[2][0];
      }
      lang.strings.push_back({toks[0], toks[1], esc});
    } else if (key == "balanced") {
      if (!balanced_seen) lang.balanced.clear();
      balanced_seen = true;
      for (const auto& t : toks) {
        if (t.size() != 2) fail("balanced pairs are two characters, e.g. ()");
        lang.balanced.push_back({t[0], t[1]});
      }
    } else if (key == "identifier_extra") {
      lang.identifier_extra = toks.empty() ? "" : toks[0];
    } else if (key == "nested_comments") {
      if (toks.size() != 1 || (toks[0] != "true" && toks[0] != "false"))
        fail("nested_comments is true or false");
      lang.nested_comments = toks[0] == "true";
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  for (const auto& lang : out) lang.validate();
  return out;
}

const LanguageRegistry& LanguageRegistry::builtin() {
  static const LanguageRegistry registry = [] {
    LanguageRegistry r;
    r.load_config(kBuiltinLanguages);
    return r;
  }();
  return registry;
}

void LanguageRegistry::add(LanguageDefinition lang) {
  lang.validate();
  std::string key = lang.name;
  langs_.insert_or_assign(std::move(key), std::move(lang));
}

void LanguageRegistry::load_config(std::string_view text) {
  for (auto& lang : parse_language_config(text)) add(std::move(lang));
}

const LanguageDefinition& LanguageRegistry::get(std::string_view name) const {
  if (const auto* lang = find(name)) return *lang;
  throw ConfigError("unknown language '" + std::string(name) + "'");
}

const LanguageDefinition* LanguageRegistry::find(std::string_view name) const {
  auto it = langs_.find(name);
  return it == langs_.end() ? nullptr : &it->second;
}

const LanguageDefinition* LanguageRegistry::find_by_extension(
    std::string_view ext) const {
  for (const auto& [name, lang] : langs_)
    for (const auto& e : lang.extensions)
      if (e == ext) return &lang;
  return nullptr;
}

std::vector<std::string> LanguageRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, lang] : langs_) out.push_back(name);
  return out;
}

SourceMap::SourceMap(std::string source, const LanguageDefinition& lang)
    : source_(std::move(source)), lang_(lang) {
  scan();
  pair_brackets();
}

void SourceMap::scan() {
  const std::string_view src = source_;
  const std::size_t n = src.size();
  kinds_.assign(n, Region::Code);
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (src[i] == '\n') {
      ++newlines_;
      if (i + 1 < n) line_starts_.push_back(i + 1);
    }
  }

  auto push = [&](Region kind, std::size_t b, std::size_t e,
                  std::size_t unit_end, bool opens = false) {
    if (b >= e) return;
    if (kind == Region::Code && !regions_.empty() &&
        regions_.back().kind == Region::Code && regions_.back().end == b) {
      regions_.back().end = regions_.back().unit_end = e;
    } else {
      regions_.push_back({kind, b, e, unit_end, opens});
    }
    std::fill(kinds_.begin() + static_cast<std::ptrdiff_t>(b),
              kinds_.begin() + static_cast<std::ptrdiff_t>(e), kind);
  };
  auto warn = [&](std::size_t at, const std::string& what) {
    warnings_.push_back({"", position(at).line, what});
  };

  std::size_t pos = 0;
  while (pos < n) {
    // Longest opening delimiter wins across comment and string syntaxes.
    enum class Hit { None, Line, Block, String } hit = Hit::None;
    std::size_t best = 0, which = 0;
    auto consider = [&](Hit h, std::size_t idx, std::string_view open) {
      if (open.size() > best && starts_with_at(src, pos, open)) {
        hit = h;
        best = open.size();
        which = idx;
      }
    };
    for (std::size_t i = 0; i < lang_.line_comments.size(); ++i)
      consider(Hit::Line, i, lang_.line_comments[i]);
    for (std::size_t i = 0; i < lang_.block_comments.size(); ++i)
      consider(Hit::Block, i, lang_.block_comments[i].open);
    for (std::size_t i = 0; i < lang_.strings.size(); ++i)
      consider(Hit::String, i, lang_.strings[i].open);

    switch (hit) {
      case Hit::None:
        push(Region::Code, pos, pos + 1, pos + 1);
        ++pos;
        break;
      case Hit::Line: {
        std::size_t e = src.find('\n', pos);
        if (e == std::string_view::npos) e = n;
        push(Region::Comment, pos, e, e);
        pos = e;
        break;
      }
      case Hit::Block: {
        const auto& bc = lang_.block_comments[which];
        std::size_t q = pos + bc.open.size();
        int depth = 1;
        while (q < n && depth > 0) {
          if (lang_.nested_comments && starts_with_at(src, q, bc.open)) {
            ++depth;
            q += bc.open.size();
          } else if (starts_with_at(src, q, bc.close)) {
            --depth;
            q += bc.close.size();
          } else {
            ++q;
          }
        }
        if (depth > 0) warn(pos, "unterminated block comment");
        push(Region::Comment, pos, q, q);
        pos = q;
        break;
      }
      case Hit::String: {
        const auto& ss = lang_.strings[which];
        std::size_t body = pos + ss.open.size();
        std::size_t q = body;
        bool closed = false;
        while (q < n) {
          if (ss.escape != '\0' && src[q] == ss.escape) {
            q = std::min(n, q + 2);
          } else if (starts_with_at(src, q, ss.close)) {
            closed = true;
            break;
          } else {
            ++q;
          }
        }
        std::size_t literal_end = closed ? q + ss.close.size() : n;
        push(Region::StringDelimiter, pos, body, literal_end, true);
        push(Region::StringBody, body, q, q);
        if (closed) {
          push(Region::StringDelimiter, q, literal_end, literal_end);
        } else {
          warn(pos, "unterminated string literal");
        }
        pos = literal_end;
        break;
      }
    }
  }
}

void SourceMap::pair_brackets() {
  partner_.assign(source_.size(), kNoPartner);
  std::vector<std::size_t> stack;
  for (const auto& r : regions_) {
    if (r.kind != Region::Code) continue;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      char c = source_[i];
      if (lang_.is_open(c)) {
        stack.push_back(i);
      } else if (lang_.is_close(c)) {
        if (!stack.empty() && lang_.close_for(source_[stack.back()]) == c) {
          partner_[stack.back()] = static_cast<std::uint32_t>(i);
          stack.pop_back();
        } else {
          // A mismatched close leaves every open on the stack unbalanced.
          stack.clear();
        }
      }
    }
  }
}

std::size_t SourceMap::region_index(std::size_t offset) const {
  auto it = std::upper_bound(
      regions_.begin(), regions_.end(), offset,
      [](std::size_t off, const RegionSpan& r) { return off < r.begin; });
  return static_cast<std::size_t>(it - regions_.begin()) - 1;
}

Position SourceMap::position(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
  return {line, offset - line_starts_[line - 1] + 1};
}

std::optional<std::size_t> SourceMap::partner(std::size_t offset) const {
  if (offset >= partner_.size() || partner_[offset] == kNoPartner)
    return std::nullopt;
  return partner_[offset];
}

std::size_t scan_balanced(const SourceMap& map, std::size_t start) {
  if (start >= map.size() || map.region_at(start) != Region::Code ||
      !map.language().is_open(map.source()[start]))
    throw std::invalid_argument(
        "scan_balanced: offset is not an open delimiter in code");
  if (auto close = map.partner(start)) return *close + 1;
  throw UnbalancedInput(start);
}

}  // namespace factlog
