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

// Reference implementations that share no evaluation code with the engine.

#pragma once

#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factlog/datalog.hpp"

namespace oracle {

using Row = std::vector<factlog::Constant>;
using Model = std::map<std::string, std::set<Row>>;

/// Naive bottom-up fixpoint: every rule is re-applied to the whole model
/// until nothing changes. Negation is handled by ranking relations so that a
/// negated relation is fully computed first.
class NaiveEvaluator {
 public:
  explicit NaiveEvaluator(const factlog::DatalogProgram& p) : prog_(p) {}

  Model run(Model model) const {
    for (const auto& f : prog_.facts) {
      Row r;
      for (const auto& t : f.terms) r.push_back(constant(t));
      model[f.relation].insert(r);
    }
    std::map<std::string, int> rank;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& rule : prog_.rules) {
        int need = 0;
        for (const auto& lit : rule.body)
          need = std::max(need, rank[lit.atom.relation] + (lit.positive ? 0 : 1));
        if (rank[rule.head.relation] < need) {
          rank[rule.head.relation] = need;
          changed = true;
        }
      }
    }
    int top = 0;
    for (const auto& [n, r] : rank) top = std::max(top, r);
    for (int level = 0; level <= top; ++level) {
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& rule : prog_.rules) {
          if (rank[rule.head.relation] != level) continue;
          std::vector<Row> derived;
          std::map<std::string, factlog::Constant> env;
          solve(rule, 0, env, model, derived);
          for (auto& d : derived)
            changed |= model[rule.head.relation].insert(d).second;
        }
      }
    }
    return model;
  }

 private:
  static factlog::Constant constant(const factlog::Term& t) {
    if (const auto* n = std::get_if<std::int64_t>(&t)) return *n;
    return std::get<std::string>(t);
  }

  static bool unify(const factlog::Atom& a, const Row& row,
                    std::map<std::string, factlog::Constant>& env) {
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      if (const auto* v = std::get_if<factlog::Variable>(&a.terms[i])) {
        if (v->name.starts_with("_#")) continue;  // `_` wildcards
        auto it = env.find(v->name);
        if (it == env.end()) env[v->name] = row[i];
        else if (!(it->second == row[i])) return false;
      } else if (!(constant(a.terms[i]) == row[i])) {
        return false;
      }
    }
    return true;
  }

  void solve(const factlog::DatalogRule& rule, std::size_t k,
             std::map<std::string, factlog::Constant>& env, const Model& model,
             std::vector<Row>& out) const {
    if (k == rule.body.size()) {
      Row head;
      for (const auto& t : rule.head.terms) {
        if (const auto* v = std::get_if<factlog::Variable>(&t)) head.push_back(env.at(v->name));
        else head.push_back(constant(t));
      }
      out.push_back(head);
      return;
    }
    const auto& lit = rule.body[k];
    auto it = model.find(lit.atom.relation);
    static const std::set<Row> kNone;
    const auto& rows = it == model.end() ? kNone : it->second;
    if (!lit.positive) {
      for (const auto& row : rows) {
        auto copy = env;
        if (unify(lit.atom, row, copy)) return;  // some tuple matches
      }
      solve(rule, k + 1, env, model, out);
      return;
    }
    for (const auto& row : rows) {
      auto copy = env;
      if (unify(lit.atom, row, copy)) solve(rule, k + 1, copy, model, out);
    }
  }

  const factlog::DatalogProgram& prog_;
};

/// Breadth-first reachability over an edge list: pairs (x, y) with a
/// non-empty path from x to y.
inline std::set<std::pair<std::string, std::string>> reachable(
    const std::set<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [a, b] : edges) succ[a].push_back(b);
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [src, _] : succ) {
    std::set<std::string> seen;
    std::queue<std::string> work;
    for (const auto& n : succ[src]) work.push(n);
    while (!work.empty()) {
      auto n = work.front();
      work.pop();
      if (!seen.insert(n).second) continue;
      out.insert({src, n});
      if (auto it = succ.find(n); it != succ.end())
        for (const auto& m : it->second) work.push(m);
    }
  }
  return out;
}

/// Liveness computed directly from read/write/next sets, forward form:
/// live(x,l) if read(x,l), or live(x,i), next(i,l) and not write(x,l).
inline std::set<std::pair<std::string, std::int64_t>> forward_liveness(
    const std::set<std::pair<std::string, std::int64_t>>& reads,
    const std::set<std::pair<std::string, std::int64_t>>& writes,
    const std::set<std::pair<std::int64_t, std::int64_t>>& next) {
  auto live = reads;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [x, i] : std::set(live))
      for (const auto& [a, l] : next)
        if (a == i && !writes.count({x, l})) changed |= live.insert({x, l}).second;
  }
  return live;
}

/// Random negation-free program text over unary and binary relations.
struct RandomProgram {
  std::string text;
  std::vector<std::string> relations;
};

inline RandomProgram random_program(std::mt19937& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  int nrel = 1 + pick(4), nrules = 1 + pick(6), nfacts = pick(31),
      nsym = 1 + pick(8);
  std::vector<int> arity(nrel);
  RandomProgram out;
  for (int r = 0; r < nrel; ++r) {
    arity[r] = 1 + pick(2);
    out.relations.push_back("r" + std::to_string(r));
  }
  auto sym = [&] { return "s" + std::to_string(pick(nsym)); };
  for (int f = 0; f < nfacts; ++f) {
    int r = pick(nrel);
    out.text += out.relations[r] + "(" + sym();
    if (arity[r] == 2) out.text += ", " + sym();
    out.text += ").\n";
  }
  const char* vars[] = {"X", "Y", "Z", "W"};
  for (int k = 0; k < nrules; ++k) {
    int nbody = 1 + pick(3);
    std::vector<std::string> bound;
    std::string body;
    for (int b = 0; b < nbody; ++b) {
      int r = pick(nrel);
      body += (b ? ", " : "") + out.relations[r] + "(";
      for (int c = 0; c < arity[r]; ++c) {
        std::string t;
        if (pick(6) == 0) {
          t = sym();
        } else {
          t = vars[pick(4)];
          bound.push_back(t);
        }
        body += (c ? ", " : "") + t;
      }
      body += ")";
    }
    int h = pick(nrel);
    std::string head = out.relations[h] + "(";
    for (int c = 0; c < arity[h]; ++c) {
      std::string t = bound.empty() || pick(8) == 0 ? sym() : bound[pick(static_cast<int>(bound.size()))];
      head += (c ? ", " : "") + t;
    }
    out.text += head + ") :- " + body + ".\n";
  }
  for (int r = 0; r < nrel; ++r)  // pin every arity, even for unused names
    out.text = ".decl " + out.relations[r] + "(" +
               (arity[r] == 2 ? "a:symbol, b:symbol" : "a:symbol") + ")\n" +
               out.text;
  return out;
}

inline Model model_of(const factlog::Database& db) {
  Model m;
  for (const auto& name : db.relation_names())
    for (const auto& t : db.tuples(name)) m[name].insert(t);
  return m;
}

}  // namespace oracle
