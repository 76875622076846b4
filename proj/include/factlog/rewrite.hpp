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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "factlog/lang.hpp"
#include "factlog/template.hpp"

namespace factlog {

// $x, $x.line, $x.column + n
struct Substitution {
  std::string hole;
  Property prop = Property::Value;
  std::int64_t offset = 0;  // only for Line / Column
  bool operator==(const Substitution&) const = default;
};

using RewriteAtom = std::variant<Literal, Substitution>;

struct RewriteTemplate {
  std::vector<RewriteAtom> atoms;
  std::vector<std::string> hole_names() const;
};

RewriteTemplate parse_rewrite_template(std::string_view text);

/// Throws UnboundHole when a referenced hole is absent from `env`.
std::string substitute(const RewriteTemplate& rt, const MatchEnvironment& env);

enum class CompareOp { Eq, Neq };

struct Condition {
  std::string hole;
  CompareOp op = CompareOp::Eq;
  std::string literal;

  bool holds(const MatchEnvironment& env) const;
};

/// `rewrite $target { match -> rewrite [where cond, ...] }`. The optional
/// conditions filter inner matches and may name inner or outer holes.
struct NestedRewrite {
  std::string target;
  Template match;
  RewriteTemplate rewrite;
  std::vector<Condition> conditions;
};

struct RuleSpec {
  bool nested = false;
  std::vector<Condition> conditions;
  std::vector<NestedRewrite> rewrites;
};

/// Parses `where clause, clause, ...` where a clause is `nested`,
/// `$x == "lit"`, `$x != "lit"` or a rewrite block. Empty text is an empty
/// rule. Throws ConfigError.
RuleSpec parse_rule(std::string_view text);

/// Returns nullopt when a condition fails (the rule does not fire). Otherwise
/// every rewrite target is rebound to the inner rewrite output, one line per
/// inner match, enclosing matches before the matches nested inside them.
std::optional<MatchEnvironment> apply_rule(const RuleSpec& rule,
                                           const MatchEnvironment& env,
                                           const SourceMap& map);

struct FactSpec {
  std::string name;
  std::string language;
  Template outer;
  RuleSpec rule;
  RewriteTemplate final;
};

/// Loads a fact spec file:
///
///   language = go
///   [match]
///   func $f(...) $r? {$body*}
///   [rule]
///   where nested, rewrite $body { $c(...) -> edge("$f", "$c"). }
///   [rewrite]
///   $body
///
/// Throws ConfigError (also for holes that would be unbound at evaluation).
FactSpec parse_fact_spec(std::string_view text, std::string name = {});

struct Fact {
  std::string relation;
  std::vector<Constant> args;

  bool operator==(const Fact&) const = default;
  bool operator<(const Fact& other) const;
};

bool constant_less(const Constant& a, const Constant& b);

/// `ident(arg, ...).` with quoted symbols or signed integers.
/// Throws MalformedFact.
Fact parse_fact_line(std::string_view line);

/// `rel("sym", 3).`
std::string format_fact(const Fact& fact);
std::string format_constant(const Constant& c);

/// Sorted, duplicate-free facts with a fixed arity per relation.
class FactSet {
 public:
  /// Returns false for duplicates; throws ArityMismatch on an arity clash.
  bool insert(Fact fact);
  void merge(const FactSet& other);

  const std::set<Fact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  std::size_t count(std::string_view relation) const;
  std::vector<std::string> relations() const;
  std::vector<Fact> relation(std::string_view name) const;

  /// One `rel(...).` line per fact.
  std::string to_datalog() const;
  /// Tab-separated rows of one relation, symbols unquoted.
  std::string to_tsv(std::string_view relation) const;

  bool operator==(const FactSet&) const = default;

 private:
  std::set<Fact> facts_;
  std::map<std::string, std::size_t, std::less<>> arity_;
};

/// Reads `rel(...).` lines; blank lines and `//` comments are skipped.
FactSet parse_fact_text(std::string_view text);

/// TSV field escaping shared by every tab-separated writer and reader.
std::string escape_tsv(std::string_view field);
std::string unescape_tsv(std::string_view field);

struct SourceFile {
  std::string path;
  std::optional<std::string> content;  // read from `path` when absent
};

struct FileFacts {
  std::string path;
  std::size_t newlines = 0;
  std::vector<std::size_t> matches;  // fired outer matches, per spec
  std::map<std::string, std::size_t, std::less<>> unique_facts;  // per relation
};

struct GenerationResult {
  FactSet facts;
  std::vector<FileFacts> files;
  std::vector<Diagnostic> diagnostics;
};

struct GenerationOptions {
  const LanguageRegistry* languages = &LanguageRegistry::builtin();
  unsigned jobs = 1;
};

GenerationResult generate_facts(const FactSpec& spec,
                                std::span<const SourceFile> files,
                                const GenerationOptions& options = {});

/// Runs every spec over every file; files are classified once per language.
GenerationResult generate_facts(std::span<const FactSpec> specs,
                                std::span<const SourceFile> files,
                                const GenerationOptions& options = {});

}  // namespace factlog
