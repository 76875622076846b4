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

#include "factlog/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "factlog/error.hpp"

namespace factlog {
namespace {

// ---------------------------------------------------------------------------
// Lexer / parser

struct Token {
  enum Kind {
    Ident, String, Number, LParen, RParen, Comma, Dot, Colon, Implies, Bang,
    End
  } kind = End;
  std::string text;
  std::int64_t number = 0;
  std::size_t offset = 0, line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  /// Skips raw text up to the `)` closing an already consumed `(`.
  void skip_group(std::size_t line, std::size_t column) {
    int depth = 1;
    while (pos_ < src_.size() && depth > 0) {
      char c = src_[pos_];
      if (c == '"') {
        advance(1);
        while (pos_ < src_.size() && src_[pos_] != '"') {
          if (src_[pos_] == '\\') advance(1);
          advance(1);
        }
      }
      depth += c == '(';
      depth -= c == ')';
      advance(1);
    }
    if (depth > 0) throw DatalogSyntaxError(line, column, "unterminated parameters");
  }

  Token next() {
    skip_trivia();
    Token t;
    t.offset = pos_;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Token::Kind k) {
      advance(1);
      t.kind = k;
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        advance(1);
      t.kind = Token::Ident;
      t.text = std::string(src_.substr(b, pos_ - b));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t b = pos_;
      advance(1);
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance(1);
      t.kind = Token::Number;
      t.text = std::string(src_.substr(b, pos_ - b));
      try {
        t.number = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw DatalogSyntaxError(t.line, t.column, "integer out of range");
      }
      return t;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      while (true) {
        if (pos_ >= src_.size() || src_[pos_] == '\n')
          throw DatalogSyntaxError(t.line, t.column, "unterminated string");
        char d = src_[pos_];
        advance(1);
        if (d == '"') break;
        if (d == '\\' && pos_ < src_.size()) {
          char e = src_[pos_];
          advance(1);
          s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          s += d;
        }
      }
      t.kind = Token::String;
      t.text = std::move(s);
      return t;
    }
    if (src_.substr(pos_, 2) == ":-") {
      advance(2);
      t.kind = Token::Implies;
      return t;
    }
    if (src_.substr(pos_, 2) == "\xC2\xAC") {  // ¬
      advance(2);
      t.kind = Token::Bang;
      return t;
    }
    switch (c) {
      case '(': return single(Token::LParen);
      case ')': return single(Token::RParen);
      case ',': return single(Token::Comma);
      case '.': return single(Token::Dot);
      case ':': return single(Token::Colon);
      case '!': return single(Token::Bang);
      default: break;
    }
    throw DatalogSyntaxError(t.line, t.column,
                             std::string("unexpected character '") + c + "'");
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (src_.substr(pos_, 2) == "/*") {
        std::size_t line = line_, col = col_;
        advance(2);
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance(1);
        if (pos_ >= src_.size())
          throw DatalogSyntaxError(line, col, "unterminated comment");
        advance(2);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

bool is_variable_name(std::string_view s) {
  return !s.empty() &&
         (std::isupper(static_cast<unsigned char>(s.front())) || s.front() == '_');
}

constexpr std::string_view kAnonPrefix = "_#";

bool is_anonymous(const Variable& v) { return v.name.starts_with(kAnonPrefix); }

struct Located {
  Atom atom;
  std::size_t line, column;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { bump(); }

  DatalogProgram parse() {
    while (cur_.kind != Token::End) statement();
    finalize();
    return std::move(prog_);
  }

  Atom single_atom() {
    Atom a = atom();
    if (cur_.kind == Token::Dot) bump();
    if (cur_.kind != Token::End) fail("unexpected input after atom");
    return a;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DatalogSyntaxError(cur_.line, cur_.column, what);
  }

  void bump() {
    prev_ = cur_;
    cur_ = lex_.next();
  }

  void expect(Token::Kind k, const char* what) {
    if (cur_.kind != k) fail(std::string("expected ") + what);
    bump();
  }

  std::string ident(const char* what) {
    if (cur_.kind != Token::Ident) fail(std::string("expected ") + what);
    std::string s = cur_.text;
    bump();
    return s;
  }

  void statement() {
    if (cur_.kind == Token::Dot) {
      std::size_t dot_end = cur_.offset + 1;
      bump();
      if (cur_.kind != Token::Ident || cur_.offset != dot_end)
        fail("expected a directive after '.'");
      directive();
      return;
    }
    std::size_t line = cur_.line, column = cur_.column;
    Atom head = atom();
    if (cur_.kind == Token::Dot) {
      bump();
      for (const auto& t : head.terms)
        if (std::holds_alternative<Variable>(t))
          throw DatalogSyntaxError(line, column,
                                   "fact " + head.relation + " is not ground");
      prog_.facts.push_back(head);
      return;
    }
    expect(Token::Implies, "'.' or ':-'");
    DatalogRule rule{std::move(head), {}};
    while (true) {
      bool positive = true;
      if (cur_.kind == Token::Bang) {
        positive = false;
        bump();
      }
      rule.body.push_back({atom(), positive});
      if (cur_.kind == Token::Comma) {
        bump();
        continue;
      }
      break;
    }
    expect(Token::Dot, "',' or '.' after rule body");
    check_safety(rule, line, column);
    prog_.rules.push_back(std::move(rule));
  }

  void directive() {
    std::size_t line = prev_.line, column = prev_.column;
    std::string name = ident("directive");
    if (name == "decl") {
      RelationDecl decl;
      decl.name = ident("relation name");
      decl.declared = true;
      expect(Token::LParen, "'('");
      if (cur_.kind != Token::RParen) {
        while (true) {
          decl.arg_names.push_back(ident("attribute name"));
          expect(Token::Colon, "':'");
          std::string type = ident("attribute type");
          if (type == "symbol") decl.types.push_back(ColumnType::Symbol);
          else if (type == "number") decl.types.push_back(ColumnType::Number);
          else fail("unsupported type '" + type + "' (symbol or number)");
          if (cur_.kind != Token::Comma) break;
          bump();
        }
      }
      expect(Token::RParen, "')'");
      if (decls_.count(decl.name))
        throw DatalogSyntaxError(line, column,
                                 "relation " + decl.name + " declared twice");
      decls_.insert(decl.name);
      prog_.relations[decl.name] = std::move(decl);
    } else if (name == "input" || name == "output" || name == "printsize") {
      while (true) {
        std::string rel = ident("relation name");
        if (name == "output") prog_.outputs.push_back(rel);
        if (cur_.kind == Token::LParen) {  // IO parameters are ignored
          lex_.skip_group(cur_.line, cur_.column);
          bump();
        }
        if (cur_.kind != Token::Comma) break;
        bump();
      }
    } else {
      throw DatalogSyntaxError(line, column, "unsupported directive ." + name);
    }
  }

  Atom atom() {
    std::size_t line = cur_.line, column = cur_.column;
    Atom a;
    a.relation = ident("relation name");
    expect(Token::LParen, "'('");
    if (cur_.kind != Token::RParen) {
      while (true) {
        a.terms.push_back(term());
        if (cur_.kind != Token::Comma) break;
        bump();
      }
    }
    expect(Token::RParen, "')'");
    uses_.push_back({a, line, column});
    return a;
  }

  Term term() {
    Token t = cur_;
    switch (t.kind) {
      case Token::Ident:
        bump();
        if (t.text == "_")
          return Variable{std::string(kAnonPrefix) + std::to_string(anon_++)};
        if (is_variable_name(t.text)) return Variable{t.text};
        return t.text;
      case Token::String:
        bump();
        return t.text;
      case Token::Number:
        bump();
        return t.number;
      default:
        fail("expected a variable, symbol or number");
    }
  }

  void check_safety(const DatalogRule& rule, std::size_t line,
                    std::size_t column) {
    std::set<std::string> positive;
    for (const auto& lit : rule.body)
      if (lit.positive)
        for (const auto& t : lit.atom.terms)
          if (const auto* v = std::get_if<Variable>(&t)) positive.insert(v->name);
    auto where = std::to_string(line) + ":" + std::to_string(column) + ": ";
    for (const auto& t : rule.head.terms) {
      if (const auto* v = std::get_if<Variable>(&t)) {
        if (is_anonymous(*v))
          throw UnsafeRule(where + "anonymous variable in rule head");
        if (!positive.count(v->name))
          throw UnsafeRule(where + "head variable " + v->name +
                           " does not occur in a positive body literal");
      }
    }
    for (const auto& lit : rule.body) {
      if (lit.positive) continue;
      for (const auto& t : lit.atom.terms)
        if (const auto* v = std::get_if<Variable>(&t);
            v && !is_anonymous(*v) && !positive.count(v->name))
          throw UnsafeRule(where + "variable " + v->name + " in !" +
                           lit.atom.relation +
                           " does not occur in a positive body literal");
    }
  }

  void finalize() {
    struct Observed {
      bool any = false, all_numbers = true;
    };
    std::map<std::string, std::vector<Observed>> inferred;
    for (const auto& use : uses_) {
      const Atom& a = use.atom;
      auto where = std::to_string(use.line) + ":" + std::to_string(use.column);
      auto it = prog_.relations.find(a.relation);
      if (it != prog_.relations.end() && it->second.declared) {
        const auto& decl = it->second;
        if (decl.arity() != a.terms.size())
          throw ArityMismatch(where + ": " + a.relation + " declared with " +
                              std::to_string(decl.arity()) +
                              " attributes, used with " +
                              std::to_string(a.terms.size()));
        for (std::size_t i = 0; i < a.terms.size(); ++i) {
          bool is_num = std::holds_alternative<std::int64_t>(a.terms[i]);
          bool is_sym = std::holds_alternative<std::string>(a.terms[i]);
          if ((is_num && decl.types[i] == ColumnType::Symbol) ||
              (is_sym && decl.types[i] == ColumnType::Number))
            throw TypeMismatch(where + ": argument " + std::to_string(i + 1) +
                               " of " + a.relation + " has the wrong type");
        }
        continue;
      }
      auto [obs, fresh] = inferred.try_emplace(a.relation, a.terms.size());
      if (!fresh && obs->second.size() != a.terms.size())
        throw ArityMismatch(where + ": " + a.relation + " used with " +
                            std::to_string(a.terms.size()) +
                            " arguments, previously " +
                            std::to_string(obs->second.size()));
      for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (std::holds_alternative<Variable>(a.terms[i])) continue;
        obs->second[i].any = true;
        obs->second[i].all_numbers &=
            std::holds_alternative<std::int64_t>(a.terms[i]);
      }
    }
    for (const auto& [name, cols] : inferred) {
      RelationDecl decl;
      decl.name = name;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        decl.arg_names.push_back("a" + std::to_string(i));
        decl.types.push_back(!cols[i].any           ? ColumnType::Unknown
                             : cols[i].all_numbers ? ColumnType::Number
                                                   : ColumnType::Symbol);
      }
      prog_.relations[name] = std::move(decl);
    }
  }

  Lexer lex_;
  Token cur_, prev_;
  DatalogProgram prog_;
  std::set<std::string> decls_;
  std::vector<Located> uses_;
  int anon_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

struct Slot {
  enum Kind { Const, Var, Wild } kind = Wild;
  std::size_t var = 0;
  Value value;
};

struct CompiledAtom {
  std::string relation;
  std::vector<Slot> slots;
};

struct CompiledRule {
  CompiledAtom head;
  std::vector<CompiledAtom> positive;
  std::vector<CompiledAtom> negative;
  std::size_t vars = 0;
};

CompiledAtom compile_atom(const Atom& a, Database& db,
                          std::map<std::string, std::size_t>& vars) {
  CompiledAtom out{a.relation, {}};
  for (const auto& t : a.terms) {
    Slot s;
    if (const auto* v = std::get_if<Variable>(&t)) {
      if (is_anonymous(*v)) {
        s.kind = Slot::Wild;
      } else {
        s.kind = Slot::Var;
        auto [it, fresh] = vars.try_emplace(v->name, vars.size());
        s.var = it->second;
      }
    } else if (const auto* n = std::get_if<std::int64_t>(&t)) {
      s.kind = Slot::Const;
      s.value = {Value::Number, *n};
    } else {
      s.kind = Slot::Const;
      s.value = db.encode(std::get<std::string>(t));
    }
    out.slots.push_back(s);
  }
  return out;
}

CompiledRule compile_rule(const DatalogRule& r, Database& db) {
  CompiledRule out;
  std::map<std::string, std::size_t> vars;
  for (const auto& lit : r.body)
    if (lit.positive) out.positive.push_back(compile_atom(lit.atom, db, vars));
  for (const auto& lit : r.body)
    if (!lit.positive) out.negative.push_back(compile_atom(lit.atom, db, vars));
  out.head = compile_atom(r.head, db, vars);
  out.vars = vars.size();
  return out;
}

class RuleEvaluator {
 public:
  RuleEvaluator(const CompiledRule& rule, const Database& db,
                const std::vector<const Relation*>& sources)
      : rule_(rule), db_(db), sources_(sources), vals_(rule.vars),
        bound_(rule.vars, false) {}

  // Derives head tuples; `first` is the positive literal joined first.
  void run(std::size_t first, const std::function<void(Tuple)>& emit) {
    emit_ = &emit;
    order_.clear();
    order_.push_back(first);
    for (std::size_t i = 0; i < rule_.positive.size(); ++i)
      if (i != first) order_.push_back(i);
    join(0);
  }

 private:
  void key_for(const CompiledAtom& a, std::uint64_t& mask, Tuple& key) const {
    mask = 0;
    key.clear();
    for (std::size_t c = 0; c < a.slots.size(); ++c) {
      const Slot& s = a.slots[c];
      if (s.kind == Slot::Const) {
        mask |= 1ull << c;
        key.push_back(s.value);
      } else if (s.kind == Slot::Var && bound_[s.var]) {
        mask |= 1ull << c;
        key.push_back(vals_[s.var]);
      }
    }
  }

  void join(std::size_t k) {
    if (k == order_.size()) {
      finish();
      return;
    }
    const CompiledAtom& a = rule_.positive[order_[k]];
    const Relation& rel = *sources_[order_[k]];
    std::uint64_t mask;
    Tuple key;
    key_for(a, mask, key);
    auto visit = [&](const Tuple& row) {
      std::vector<std::size_t> newly;
      bool ok = true;
      for (std::size_t c = 0; c < a.slots.size() && ok; ++c) {
        const Slot& s = a.slots[c];
        if (s.kind != Slot::Var) continue;
        if (bound_[s.var]) {
          ok = vals_[s.var] == row[c];
        } else {
          bound_[s.var] = true;
          vals_[s.var] = row[c];
          newly.push_back(s.var);
        }
      }
      if (ok) join(k + 1);
      for (auto v : newly) bound_[v] = false;
    };
    if (mask == 0) {
      const auto& rows = rel.rows();
      for (std::size_t i = 0, n = rows.size(); i < n; ++i) visit(rows[i]);
    } else {
      const auto& hits = rel.lookup(mask, key);
      for (std::size_t idx : hits) visit(rel.rows()[idx]);
    }
  }

  void finish() {
    for (const auto& neg : rule_.negative) {
      const Relation* rel = db_.find(neg.relation);
      if (!rel) continue;
      std::uint64_t mask;
      Tuple key;
      key_for(neg, mask, key);
      if (mask == 0 ? !rel->empty() : !rel->lookup(mask, key).empty()) return;
    }
    Tuple t;
    t.reserve(rule_.head.slots.size());
    for (const auto& s : rule_.head.slots)
      t.push_back(s.kind == Slot::Const ? s.value : vals_[s.var]);
    (*emit_)(std::move(t));
  }

  const CompiledRule& rule_;
  const Database& db_;
  const std::vector<const Relation*>& sources_;
  std::vector<Value> vals_;
  std::vector<bool> bound_;
  std::vector<std::size_t> order_;
  const std::function<void(Tuple)>* emit_ = nullptr;
};

void check_types(const DatalogProgram& program, Database& db) {
  for (const auto& [name, decl] : program.relations) {
    const Relation* rel = db.find(name);
    if (!rel) continue;
    for (const auto& row : rel->rows()) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        ColumnType t = decl.types[c];
        if (t == ColumnType::Unknown) continue;
        bool number = row[c].kind == Value::Number;
        if (number != (t == ColumnType::Number))
          throw TypeMismatch("relation " + name + " column " +
                             std::to_string(c + 1) + " expects " +
                             (t == ColumnType::Number ? "number" : "symbol") +
                             ", got " + format_constant(db.decode(row[c])));
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::set<std::string, std::less<>> DatalogProgram::idb() const {
  std::set<std::string, std::less<>> out;
  for (const auto& r : rules) out.insert(r.head.relation);
  return out;
}

DatalogProgram parse_program(std::string_view text) {
  return Parser(text).parse();
}

Atom parse_atom(std::string_view text) { return Parser(text).single_atom(); }

Strata stratify(const DatalogProgram& program) {
  // Dependency graph: head -> body relation, flagged when negated.
  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> id;
  auto node = [&](const std::string& n) {
    auto [it, fresh] = id.try_emplace(n, names.size());
    if (fresh) names.push_back(n);
    return it->second;
  };
  for (const auto& [n, decl] : program.relations) node(n);
  for (const auto& f : program.facts) node(f.relation);
  struct Edge {
    std::size_t to;
    bool negative;
  };
  std::vector<std::vector<Edge>> deps;
  for (const auto& r : program.rules) {
    node(r.head.relation);
    for (const auto& lit : r.body) node(lit.atom.relation);
  }
  deps.resize(names.size());
  for (const auto& r : program.rules)
    for (const auto& lit : r.body)
      deps[id[r.head.relation]].push_back({id[lit.atom.relation], !lit.positive});

  // Tarjan; components come out dependencies-first.
  const std::size_t n = names.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n), comp(n, SIZE_MAX);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& e : deps[v]) {
      if (index[e.to] == SIZE_MAX) {
        strong(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack[e.to]) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> c;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comps.size();
        c.push_back(w);
      } while (w != v);
      comps.push_back(std::move(c));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == SIZE_MAX) strong(v);

  std::vector<std::size_t> level(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t v : comps[c]) {
      for (const auto& e : deps[v]) {
        if (comp[e.to] == c) {
          if (e.negative)
            throw UnstratifiableProgram(
                "relation " + names[v] + " depends negatively on " +
                names[e.to] + " within a recursive cycle");
          continue;
        }
        level[c] = std::max(level[c], level[comp[e.to]] + 1);
      }
    }
  }
  std::size_t top = comps.empty() ? 0 : *std::max_element(level.begin(), level.end());
  Strata strata(comps.empty() ? 0 : top + 1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t v : comps[c]) strata[level[c]].push_back(names[v]);
  for (auto& s : strata) std::sort(s.begin(), s.end());
  return strata;
}

std::uint32_t SymbolTable::intern(std::string_view s) {
  auto it = ids_.find(std::string(s));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(s);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::lookup(std::string_view s) const {
  auto it = ids_.find(std::string(s));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& v : t) {
    std::size_t x = std::hash<std::int64_t>{}(v.data) ^ (v.kind * 0x51ed27u);
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

bool Relation::insert(Tuple t) {
  if (t.size() != arity_)
    throw ArityMismatch("tuple of arity " + std::to_string(t.size()) +
                        " for relation of arity " + std::to_string(arity_));
  if (!set_.insert(t).second) return false;
  rows_.push_back(std::move(t));
  return true;
}

const std::vector<std::size_t>& Relation::lookup(std::uint64_t mask,
                                                 const Tuple& key) const {
  static const std::vector<std::size_t> kEmpty;
  Index& idx = indices_[mask];
  for (; idx.upto < rows_.size(); ++idx.upto) {
    Tuple k;
    for (std::size_t c = 0; c < arity_; ++c)
      if (mask & (1ull << c)) k.push_back(rows_[idx.upto][c]);
    idx.buckets[std::move(k)].push_back(idx.upto);
  }
  auto it = idx.buckets.find(key);
  return it == idx.buckets.end() ? kEmpty : it->second;
}

bool tuple_less(const ConstantTuple& a, const ConstantTuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      constant_less);
}

Database Database::from_facts(const FactSet& facts) {
  Database db;
  for (const auto& f : facts.facts()) db.insert(f);
  return db;
}

Relation& Database::ensure(std::string_view name, std::size_t arity) {
  auto it = relations_.find(name);
  if (it == relations_.end())
    it = relations_.emplace(std::string(name), Relation(arity)).first;
  else if (it->second.arity() != arity)
    throw ArityMismatch("relation " + std::string(name) + " has arity " +
                        std::to_string(it->second.arity()) + ", got " +
                        std::to_string(arity));
  return it->second;
}

const Relation* Database::find(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

Relation* Database::find(std::string_view name) {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

std::vector<std::string> Database::relation_names() const {
  std::vector<std::string> out;
  for (const auto& [n, r] : relations_) out.push_back(n);
  return out;
}

bool Database::insert(const Fact& fact) {
  return insert(fact.relation, fact.args);
}

bool Database::insert(std::string_view relation,
                      std::span<const Constant> args) {
  Tuple t;
  for (const auto& a : args) t.push_back(encode(a));
  return ensure(relation, args.size()).insert(std::move(t));
}

Value Database::encode(const Constant& c) {
  if (const auto* n = std::get_if<std::int64_t>(&c)) return {Value::Number, *n};
  return {Value::Symbol, symbols_.intern(std::get<std::string>(c))};
}

std::optional<Value> Database::encode_existing(const Constant& c) const {
  if (const auto* n = std::get_if<std::int64_t>(&c))
    return Value{Value::Number, *n};
  auto id = symbols_.lookup(std::get<std::string>(c));
  if (!id) return std::nullopt;
  return Value{Value::Symbol, *id};
}

Constant Database::decode(const Value& v) const {
  if (v.kind == Value::Number) return v.data;
  return symbols_.name(static_cast<std::uint32_t>(v.data));
}

std::vector<ConstantTuple> Database::tuples(std::string_view name) const {
  std::vector<ConstantTuple> out;
  const Relation* rel = find(name);
  if (!rel) return out;
  out.reserve(rel->size());
  for (const auto& row : rel->rows()) {
    ConstantTuple t;
    for (const auto& v : row) t.push_back(decode(v));
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), tuple_less);
  return out;
}

std::vector<Fact> Database::facts(std::string_view name) const {
  std::vector<Fact> out;
  for (auto& t : tuples(name)) out.push_back({std::string(name), std::move(t)});
  return out;
}

std::string Database::to_datalog(std::span<const std::string> names) const {
  std::vector<std::string> sorted(names.begin(), names.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::string out;
  for (const auto& n : sorted) {
    for (const auto& f : facts(n)) {
      out += format_fact(f);
      out += '\n';
    }
  }
  return out;
}

std::string Database::to_tsv(std::string_view name) const {
  std::string out;
  for (const auto& t : tuples(name)) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += '\t';
      if (const auto* n = std::get_if<std::int64_t>(&t[i]))
        out += std::to_string(*n);
      else
        out += escape_tsv(std::get<std::string>(t[i]));
    }
    out += '\n';
  }
  return out;
}

void Database::load_tsv(std::string_view name, std::string_view text,
                        std::span<const ColumnType> types) {
  Relation& rel = ensure(name, types.size());
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && types.size() != 0) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    auto where = std::string(name) + ".facts line " + std::to_string(lineno);
    if (fields.size() != types.size())
      throw ArityMismatch(where + ": expected " + std::to_string(types.size()) +
                          " columns, got " + std::to_string(fields.size()));
    Tuple t;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      std::optional<std::int64_t> number;
      if (!f.empty() && f.find_first_not_of("-0123456789") == std::string::npos) {
        try {
          std::size_t used = 0;
          std::int64_t v = std::stoll(f, &used);
          if (used == f.size()) number = v;
        } catch (const std::exception&) {
        }
      }
      if (types[c] == ColumnType::Number) {
        if (!number)
          throw TypeMismatch(where + ": column " + std::to_string(c + 1) +
                             " expects a number, got '" + f + "'");
        t.push_back({Value::Number, *number});
      } else if (types[c] == ColumnType::Unknown && number) {
        t.push_back({Value::Number, *number});
      } else {
        t.push_back(encode(unescape_tsv(f)));
      }
    }
    rel.insert(std::move(t));
  }
}

Database evaluate(const DatalogProgram& program, const Database& edb) {
  Database db = edb;
  for (const auto& [name, decl] : program.relations)
    db.ensure(name, decl.arity());
  for (const auto& f : program.facts) {
    Tuple t;
    for (const auto& term : f.terms) {
      if (const auto* n = std::get_if<std::int64_t>(&term))
        t.push_back({Value::Number, *n});
      else
        t.push_back(db.encode(std::get<std::string>(term)));
    }
    db.ensure(f.relation, t.size()).insert(std::move(t));
  }
  check_types(program, db);

  Strata strata = stratify(program);
  std::vector<CompiledRule> compiled;
  for (const auto& r : program.rules) compiled.push_back(compile_rule(r, db));

  for (const auto& stratum : strata) {
    std::set<std::string, std::less<>> members(stratum.begin(), stratum.end());
    std::vector<const CompiledRule*> rules;
    for (const auto& r : compiled)
      if (members.count(r.head.relation)) rules.push_back(&r);
    if (rules.empty()) continue;

    std::map<std::string, Relation, std::less<>> pending;
    auto derive = [&](const CompiledRule& r,
                      const std::vector<const Relation*>& sources,
                      std::size_t first) {
      Relation& full = *db.find(r.head.relation);
      Relation& out = pending.try_emplace(r.head.relation, full.arity())
                          .first->second;
      RuleEvaluator ev(r, db, sources);
      ev.run(first, [&](Tuple t) {
        if (!full.contains(t)) out.insert(std::move(t));
      });
    };
    auto full_sources = [&](const CompiledRule& r) {
      std::vector<const Relation*> s;
      for (const auto& a : r.positive) s.push_back(db.find(a.relation));
      return s;
    };
    auto commit = [&] {
      std::map<std::string, Relation, std::less<>> delta;
      for (auto& [name, rel] : pending) {
        Relation& full = *db.find(name);
        Relation& d = delta.try_emplace(name, rel.arity()).first->second;
        for (const auto& t : rel.rows())
          if (full.insert(t)) d.insert(t);
      }
      pending.clear();
      return delta;
    };

    for (const auto* r : rules) {
      if (r->positive.empty()) {
        // Head of a body made only of negations: ground by safety.
        std::vector<const Relation*> none;
        Relation& full = *db.find(r->head.relation);
        Relation& out =
            pending.try_emplace(r->head.relation, full.arity()).first->second;
        RuleEvaluator ev(*r, db, none);
        ev.run(0, [&](Tuple t) {
          if (!full.contains(t)) out.insert(std::move(t));
        });
        continue;
      }
      derive(*r, full_sources(*r), 0);
    }
    auto delta = commit();

    auto any = [](const auto& d) {
      return std::any_of(d.begin(), d.end(),
                         [](const auto& kv) { return !kv.second.empty(); });
    };
    while (any(delta)) {
      for (const auto* r : rules) {
        for (std::size_t i = 0; i < r->positive.size(); ++i) {
          auto it = delta.find(r->positive[i].relation);
          if (it == delta.end() || it->second.empty()) continue;
          auto sources = full_sources(*r);
          sources[i] = &it->second;
          derive(*r, sources, i);
        }
      }
      delta = commit();
    }
  }
  return db;
}

std::vector<std::string> query_variables(const Atom& pattern) {
  std::vector<std::string> out;
  for (const auto& t : pattern.terms)
    if (const auto* v = std::get_if<Variable>(&t);
        v && !is_anonymous(*v) &&
        std::find(out.begin(), out.end(), v->name) == out.end())
      out.push_back(v->name);
  return out;
}

std::vector<ConstantTuple> query(const Database& db, const Atom& pattern) {
  const Relation* rel = db.find(pattern.relation);
  if (!rel) throw UnknownRelation(pattern.relation);
  if (rel->arity() != pattern.terms.size())
    throw ArityMismatch("query " + pattern.relation + " has " +
                        std::to_string(pattern.terms.size()) +
                        " arguments, relation has arity " +
                        std::to_string(rel->arity()));
  std::vector<std::string> vars = query_variables(pattern);
  std::vector<ConstantTuple> out;

  std::uint64_t mask = 0;
  Tuple key;
  for (std::size_t c = 0; c < pattern.terms.size(); ++c) {
    const Term& t = pattern.terms[c];
    if (std::holds_alternative<Variable>(t)) continue;
    Constant k = std::holds_alternative<std::int64_t>(t)
                     ? Constant(std::get<std::int64_t>(t))
                     : Constant(std::get<std::string>(t));
    auto v = db.encode_existing(k);
    if (!v) return out;  // a symbol never seen cannot match
    mask |= 1ull << c;
    key.push_back(*v);
  }
  std::set<ConstantTuple, decltype(&tuple_less)> results(&tuple_less);
  auto visit = [&](const Tuple& row) {
    std::map<std::string, Value> binding;
    for (std::size_t c = 0; c < pattern.terms.size(); ++c) {
      const auto* v = std::get_if<Variable>(&pattern.terms[c]);
      if (!v || is_anonymous(*v)) continue;
      auto [it, fresh] = binding.try_emplace(v->name, row[c]);
      if (!fresh && !(it->second == row[c])) return;
    }
    ConstantTuple t;
    for (const auto& name : vars) t.push_back(db.decode(binding[name]));
    results.insert(std::move(t));
  };
  if (mask == 0) {
    for (const auto& row : rel->rows()) visit(row);
  } else {
    for (std::size_t i : rel->lookup(mask, key)) visit(rel->rows()[i]);
  }
  out.assign(results.begin(), results.end());
  return out;
}

}  // namespace factlog
