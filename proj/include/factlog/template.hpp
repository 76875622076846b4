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
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "factlog/lang.hpp"

namespace factlog {

enum class HoleKind {
  Expression,  // $x
  Everything,  // $x*
  Optional,    // $x?
  StringBody,  // "$x"
  Anonymous,   // ...
};

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

struct Hole {
  std::string name;  // empty for Anonymous
  HoleKind kind;
  bool operator==(const Hole&) const = default;
};

using TemplateAtom = std::variant<Literal, Hole>;

/// A match template: literal text interleaved with typed holes.
struct Template {
  std::vector<TemplateAtom> atoms;

  bool empty() const { return atoms.empty(); }
  /// Names of all named holes, in order of appearance.
  std::vector<std::string> hole_names() const;
  bool operator==(const Template&) const = default;
};

/// Recognizes `$name`, `$name*`, `$name?`, `"$name"` and `...`; everything
/// else is literal. Throws MalformedHole or DuplicateHoleName.
Template parse_template(std::string_view text);

struct Binding {
  std::string text;
  std::size_t begin = 0, end = 0;
  std::size_t line = 1, column = 1;
};

struct MatchEnvironment {
  std::map<std::string, Binding, std::less<>> bindings;

  const Binding* find(std::string_view name) const;
  const Binding& at(std::string_view name) const;  // throws UnboundHole
};

struct Match {
  std::size_t begin = 0, end = 0;
  MatchEnvironment env;
};

using MatchFilter = std::function<bool(const Match&)>;

/// All non-overlapping matches of `t` in the whole source, leftmost first.
std::vector<Match> match_all(const Template& t, const SourceMap& map);

/// Matches restricted to [begin, end). A match rejected by `accept` does not
/// consume input; scanning retries at the next offset.
std::vector<Match> match_all(const Template& t, const SourceMap& map,
                             std::size_t begin, std::size_t end,
                             const MatchFilter& accept = {});

enum class Property { Value, Line, Column };

using Constant = std::variant<std::int64_t, std::string>;

Constant get_property(const MatchEnvironment& env, std::string_view name,
                      Property prop);

}  // namespace factlog
