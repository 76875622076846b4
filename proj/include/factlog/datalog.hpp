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
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "factlog/rewrite.hpp"
#include "factlog/template.hpp"

namespace factlog {

enum class ColumnType { Symbol, Number, Unknown };

struct Variable {
  std::string name;
  bool operator==(const Variable&) const = default;
};

/// Variable, integer constant or symbol constant.
using Term = std::variant<Variable, std::int64_t, std::string>;

struct Atom {
  std::string relation;
  std::vector<Term> terms;
};

struct BodyLiteral {
  Atom atom;
  bool positive = true;
};

struct DatalogRule {
  Atom head;
  std::vector<BodyLiteral> body;
};

struct RelationDecl {
  std::string name;
  std::vector<std::string> arg_names;
  std::vector<ColumnType> types;
  bool declared = false;  // false when inferred from first use

  std::size_t arity() const { return types.size(); }
};

struct DatalogProgram {
  std::map<std::string, RelationDecl, std::less<>> relations;
  std::vector<Atom> facts;
  std::vector<DatalogRule> rules;
  std::vector<std::string> outputs;  // `.output` directives, in order

  /// Relations defined by at least one rule.
  std::set<std::string, std::less<>> idb() const;
};

/// Accepts `.decl r(a:symbol, b:number)`, `.input`/`.output` directives,
/// ground facts and rules `head :- lit, ..., lit.` with negation written `!`
/// or `¬`. Variables start with an uppercase letter or `_`; lowercase bare
/// identifiers are symbol constants. Relations without `.decl` are inferred
/// from first use. Throws DatalogSyntaxError, ArityMismatch, UnsafeRule or
/// TypeMismatch.
DatalogProgram parse_program(std::string_view text);

/// A single atom such as `calls("main", X)`, with an optional trailing `.`.
Atom parse_atom(std::string_view text);

using Strata = std::vector<std::vector<std::string>>;

/// Relations grouped by the longest dependency path below them; every
/// negated relation lands in a strictly earlier stratum. Throws
/// UnstratifiableProgram when a dependency cycle contains a negation.
Strata stratify(const DatalogProgram& program);

class SymbolTable {
 public:
  std::uint32_t intern(std::string_view s);
  std::optional<std::uint32_t> lookup(std::string_view s) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Value {
  enum Kind : std::uint8_t { Number, Symbol } kind = Number;
  std::int64_t data = 0;  // the integer, or the symbol id

  bool operator==(const Value&) const = default;
};

using Tuple = std::vector<Value>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept;
};

/// Append-only tuple set with lazily built hash indices keyed by the set of
/// bound columns.
class Relation {
 public:
  explicit Relation(std::size_t arity = 0) : arity_(arity) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Tuple>& rows() const { return rows_; }

  bool insert(Tuple t);
  bool contains(const Tuple& t) const { return set_.count(t) > 0; }

  /// Row indices whose columns in `mask` equal `key` (key lists those columns
  /// in ascending order).
  const std::vector<std::size_t>& lookup(std::uint64_t mask,
                                         const Tuple& key) const;

 private:
  struct Index {
    std::size_t upto = 0;
    std::unordered_map<Tuple, std::vector<std::size_t>, TupleHash> buckets;
  };

  std::size_t arity_;
  std::vector<Tuple> rows_;
  std::unordered_set<Tuple, TupleHash> set_;
  mutable std::map<std::uint64_t, Index> indices_;
};

using ConstantTuple = std::vector<Constant>;

bool tuple_less(const ConstantTuple& a, const ConstantTuple& b);

class Database {
 public:
  static Database from_facts(const FactSet& facts);

  /// Creates the relation if absent; throws ArityMismatch on a clash.
  Relation& ensure(std::string_view name, std::size_t arity);
  const Relation* find(std::string_view name) const;
  Relation* find(std::string_view name);
  std::vector<std::string> relation_names() const;

  bool insert(const Fact& fact);
  bool insert(std::string_view relation, std::span<const Constant> args);

  Value encode(const Constant& c);
  std::optional<Value> encode_existing(const Constant& c) const;
  Constant decode(const Value& v) const;

  /// Sorted tuples of one relation; empty when the relation is absent.
  std::vector<ConstantTuple> tuples(std::string_view name) const;
  std::vector<Fact> facts(std::string_view name) const;

  /// `rel(...).` lines for the given relations, sorted.
  std::string to_datalog(std::span<const std::string> names) const;
  std::string to_tsv(std::string_view name) const;
  /// Loads tab-separated rows. Unknown columns read integers as numbers.
  /// Throws TypeMismatch or ArityMismatch.
  void load_tsv(std::string_view name, std::string_view text,
                std::span<const ColumnType> types);

  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }

 private:
  SymbolTable symbols_;
  std::map<std::string, Relation, std::less<>> relations_;
};

/// Least model of `program` over `edb`, stratum by stratum with semi-naive
/// iteration. The result holds the EDB relations, program facts and every
/// IDB relation (possibly empty). Throws TypeMismatch when EDB tuples
/// disagree with declared column types, UnstratifiableProgram otherwise as
/// stratify does.
Database evaluate(const DatalogProgram& program, const Database& edb);

/// Bindings of the pattern's variables (in order of first appearance) over
/// the matching tuples, sorted. An all-constant pattern yields one empty
/// tuple when it holds and nothing otherwise. `_` is a wildcard.
std::vector<ConstantTuple> query(const Database& db, const Atom& pattern);

/// Variable names of a query pattern, in the order query() reports them.
std::vector<std::string> query_variables(const Atom& pattern);

}  // namespace factlog
