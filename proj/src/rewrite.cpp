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

#include "factlog/rewrite.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "factlog/error.hpp"

namespace factlog {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on `sep` outside double-quoted strings and brace groups.
std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
    } else if (c == '"') {
      quoted = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
    } else if (c == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string parse_quoted(std::string_view s, std::string_view context) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw ConfigError("expected a quoted string in '" + std::string(context) +
                      "'");
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

Condition parse_condition(std::string_view clause) {
  std::string_view s = trim(clause);
  if (s.empty() || s.front() != '$')
    throw ConfigError("expected a condition, got '" + std::string(s) + "'");
  std::size_t e = 1;
  while (e < s.size() && is_name_char(s[e])) ++e;
  Condition c;
  c.hole = std::string(s.substr(1, e - 1));
  std::string_view rest = trim(s.substr(e));
  if (rest.starts_with("==")) {
    c.op = CompareOp::Eq;
  } else if (rest.starts_with("!=")) {
    c.op = CompareOp::Neq;
  } else {
    throw ConfigError("expected == or != in '" + std::string(s) + "'");
  }
  c.literal = parse_quoted(trim(rest.substr(2)), s);
  if (c.hole.empty()) throw ConfigError("condition without a hole name");
  return c;
}

// Offset of a `->` separated by whitespace on both sides.
std::size_t find_arrow(std::string_view s) {
  for (std::size_t i = 1; i + 2 < s.size(); ++i)
    if (s.substr(i, 2) == "->" && is_space(s[i - 1]) && is_space(s[i + 2]))
      return i;
  return std::string_view::npos;
}

NestedRewrite parse_rewrite_clause(std::string_view clause) {
  std::string_view s = trim(clause);
  s.remove_prefix(std::string_view("rewrite").size());
  s = trim(s);
  if (s.empty() || s.front() != '$')
    throw ConfigError("rewrite expects a $hole target");
  std::size_t e = 1;
  while (e < s.size() && is_name_char(s[e])) ++e;
  NestedRewrite nr;
  nr.target = std::string(s.substr(1, e - 1));
  s = trim(s.substr(e));
  if (s.size() < 2 || s.front() != '{' || s.back() != '}')
    throw ConfigError("rewrite $" + nr.target + " expects a { ... } block");
  std::string_view body = trim(s.substr(1, s.size() - 2));
  std::size_t arrow = find_arrow(body);
  if (arrow == std::string_view::npos)
    throw ConfigError("rewrite block for $" + nr.target + " lacks ' -> '");
  nr.match = parse_template(trim(body.substr(0, arrow)));
  std::string_view rhs = body.substr(arrow + 2);

  // A line starting with `where` ends the rewrite text.
  std::size_t where = std::string_view::npos;
  for (std::size_t pos = 0; pos < rhs.size();) {
    std::size_t nl = rhs.find('\n', pos);
    std::string_view line =
        trim(rhs.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    if (pos > 0 && (line.starts_with("where ") || line == "where")) {
      where = rhs.find("where", pos);
      break;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  nr.rewrite = parse_rewrite_template(trim(rhs.substr(0, where)));
  if (where != std::string_view::npos) {
    std::string_view conds = rhs.substr(where + 5);
    for (auto c : split_top_level(conds, ','))
      if (!trim(c).empty()) nr.conditions.push_back(parse_condition(c));
  }
  return nr;
}

struct Sections {
  std::map<std::string, std::string, std::less<>> keys;
  std::map<std::string, std::string, std::less<>> sections;
};

Sections split_sections(std::string_view text) {
  Sections out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string* current = nullptr;
  while (std::getline(in, raw)) {
    std::string_view line = trim(raw);
    if (line == "[match]" || line == "[rule]" || line == "[rewrite]") {
      std::string name(line.substr(1, line.size() - 2));
      if (out.sections.count(name))
        throw ConfigError("duplicate section [" + name + "]");
      current = &out.sections[name];
      continue;
    }
    if (current) {
      *current += raw;
      *current += '\n';
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected key = value before sections, got '" +
                        std::string(line) + "'");
    out.keys[std::string(trim(line.substr(0, eq)))] =
        std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

void require_bound(const std::vector<std::string>& names,
                   const std::set<std::string, std::less<>>& bound,
                   const std::string& where) {
  for (const auto& n : names)
    if (!bound.count(n))
      throw ConfigError(where + " references $" + n +
                        ", which the match template does not bind");
}

void collect_inner(const NestedRewrite& nr, bool nested,
                   const MatchEnvironment& outer, const SourceMap& map,
                   std::size_t lo, std::size_t hi,
                   std::vector<std::string>& lines) {
  auto merged = [&](const Match& m) {
    MatchEnvironment env = outer;
    for (const auto& [k, v] : m.env.bindings) env.bindings[k] = v;
    return env;
  };
  MatchFilter accept;
  if (!nr.conditions.empty()) {
    accept = [&](const Match& m) {
      MatchEnvironment env = merged(m);
      return std::all_of(nr.conditions.begin(), nr.conditions.end(),
                         [&](const Condition& c) { return c.holds(env); });
    };
  }
  const auto& lang = map.language();
  for (const Match& m : match_all(nr.match, map, lo, hi, accept)) {
    lines.push_back(substitute(nr.rewrite, merged(m)));
    if (!nested) continue;
    for (std::size_t q = m.begin; q < m.end;) {
      Region r = map.region_at(q);
      if (r != Region::Code) {
        q = std::max(q + 1, map.regions()[map.region_index(q)].unit_end);
        continue;
      }
      if (lang.is_open(map.source()[q])) {
        if (auto close = map.partner(q); close && *close < m.end) {
          collect_inner(nr, nested, outer, map, q + 1, *close, lines);
          q = *close + 1;
          continue;
        }
      }
      ++q;
    }
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("error reading " + path);
  return ss.str();
}

struct PerFile {
  FileFacts stats;
  FactSet facts;
  std::vector<Diagnostic> diagnostics;
};

PerFile process_file(std::span<const FactSpec> specs, const SourceFile& file,
                     const GenerationOptions& options) {
  PerFile out;
  out.stats.path = file.path;
  out.stats.matches.assign(specs.size(), 0);
  std::string content;
  try {
    content = file.content ? *file.content : read_file(file.path);
  } catch (const std::exception& e) {
    out.diagnostics.push_back({file.path, 0, e.what()});
    return out;
  }
  out.stats.newlines =
      static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));

  std::map<std::string, SourceMap, std::less<>> maps;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const FactSpec& spec = specs[s];
    auto it = maps.find(spec.language);
    if (it == maps.end()) {
      const auto& lang = options.languages->get(spec.language);
      it = maps.emplace(spec.language, SourceMap(content, lang)).first;
      for (auto w : it->second.warnings()) {
        w.file = file.path;
        out.diagnostics.push_back(std::move(w));
      }
    }
    const SourceMap& map = it->second;
    for (const Match& m : match_all(spec.outer, map)) {
      std::optional<MatchEnvironment> env;
      try {
        env = apply_rule(spec.rule, m.env, map);
        if (!env) continue;
        ++out.stats.matches[s];
        std::string text = substitute(spec.final, *env);
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
          if (trim(line).empty()) continue;
          try {
            out.facts.insert(parse_fact_line(line));
          } catch (const Error& e) {
            out.diagnostics.push_back(
                {file.path, map.line_of(m.begin),
                 std::string(e.what()) + " in emitted line '" + line + "'"});
          }
        }
      } catch (const Error& e) {
        out.diagnostics.push_back({file.path, map.line_of(m.begin), e.what()});
      }
    }
  }
  for (const auto& rel : out.facts.relations())
    out.stats.unique_facts[rel] = out.facts.count(rel);
  return out;
}

}  // namespace

std::vector<std::string> RewriteTemplate::hole_names() const {
  std::vector<std::string> out;
  for (const auto& a : atoms)
    if (const auto* s = std::get_if<Substitution>(&a)) out.push_back(s->hole);
  return out;
}

RewriteTemplate parse_rewrite_template(std::string_view text) {
  RewriteTemplate rt;
  std::string lit;
  auto flush = [&] {
    if (!lit.empty()) rt.atoms.emplace_back(Literal{std::move(lit)});
    lit.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '$' || i + 1 >= text.size() || !is_name_start(text[i + 1])) {
      lit += text[i++];
      continue;
    }
    std::size_t e = i + 1;
    while (e < text.size() && is_name_char(text[e])) ++e;
    Substitution sub{std::string(text.substr(i + 1, e - i - 1))};
    static constexpr std::pair<std::string_view, Property> kProps[] = {
        {".line", Property::Line},
        {".column", Property::Column},
        {".value", Property::Value}};
    for (auto [suffix, prop] : kProps) {
      if (text.substr(e, suffix.size()) == suffix &&
          (e + suffix.size() >= text.size() ||
           !is_name_char(text[e + suffix.size()]))) {
        sub.prop = prop;
        e += suffix.size();
        break;
      }
    }
    if (sub.prop != Property::Value) {
      // Optional ` + n` / ` - n`.
      std::size_t k = e;
      while (k < text.size() && text[k] == ' ') ++k;
      if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
        bool negative = text[k] == '-';
        std::size_t d = k + 1;
        while (d < text.size() && text[d] == ' ') ++d;
        std::size_t digits = d;
        while (digits < text.size() && is_digit(text[digits])) ++digits;
        if (digits > d) {
          std::int64_t n = std::stoll(std::string(text.substr(d, digits - d)));
          sub.offset = negative ? -n : n;
          e = digits;
        }
      }
    }
    flush();
    rt.atoms.emplace_back(std::move(sub));
    i = e;
  }
  flush();
  return rt;
}

std::string substitute(const RewriteTemplate& rt, const MatchEnvironment& env) {
  std::string out;
  for (const auto& atom : rt.atoms) {
    if (const auto* lit = std::get_if<Literal>(&atom)) {
      out += lit->text;
      continue;
    }
    const auto& sub = std::get<Substitution>(atom);
    Constant v = get_property(env, sub.hole, sub.prop);
    if (const auto* n = std::get_if<std::int64_t>(&v))
      out += std::to_string(*n + sub.offset);
    else
      out += std::get<std::string>(v);
  }
  return out;
}

bool Condition::holds(const MatchEnvironment& env) const {
  bool equal = env.at(hole).text == literal;
  return op == CompareOp::Eq ? equal : !equal;
}

RuleSpec parse_rule(std::string_view text) {
  RuleSpec rule;
  std::string_view s = trim(text);
  if (s.empty()) return rule;
  if (!s.starts_with("where") || (s.size() > 5 && !is_space(s[5])))
    throw ConfigError("rule must start with 'where'");
  for (auto clause : split_top_level(s.substr(5), ',')) {
    std::string_view c = trim(clause);
    if (c.empty()) throw ConfigError("empty rule clause");
    if (c == "nested") {
      rule.nested = true;
    } else if (c.starts_with("rewrite") && c.size() > 7 && is_space(c[7])) {
      rule.rewrites.push_back(parse_rewrite_clause(c));
    } else {
      rule.conditions.push_back(parse_condition(c));
    }
  }
  return rule;
}

std::optional<MatchEnvironment> apply_rule(const RuleSpec& rule,
                                           const MatchEnvironment& env,
                                           const SourceMap& map) {
  for (const auto& c : rule.conditions)
    if (!c.holds(env)) return std::nullopt;
  MatchEnvironment out = env;
  for (const auto& nr : rule.rewrites) {
    Binding target = out.at(nr.target);
    std::vector<std::string> lines;
    collect_inner(nr, rule.nested, out, map, target.begin, target.end, lines);
    target.text = join_lines(lines);
    out.bindings[nr.target] = std::move(target);
  }
  return out;
}

FactSpec parse_fact_spec(std::string_view text, std::string name) {
  Sections sec = split_sections(text);
  FactSpec spec;
  spec.name = std::move(name);
  for (const auto& [k, v] : sec.keys) {
    if (k == "language") spec.language = v;
    else if (k == "name") spec.name = v;
    else throw ConfigError("unknown fact spec key '" + k + "'");
  }
  if (spec.language.empty()) throw ConfigError("fact spec lacks 'language'");
  if (!sec.sections.count("match"))
    throw ConfigError("fact spec lacks a [match] section");
  if (!sec.sections.count("rewrite"))
    throw ConfigError("fact spec lacks a [rewrite] section");
  try {
    spec.outer = parse_template(trim(sec.sections["match"]));
    spec.rule = parse_rule(sec.sections["rule"]);
  } catch (const MalformedHole& e) {
    throw ConfigError(e.what());
  } catch (const DuplicateHoleName& e) {
    throw ConfigError(e.what());
  }
  spec.final = parse_rewrite_template(trim(sec.sections["rewrite"]));
  if (spec.outer.empty()) throw ConfigError("empty [match] template");

  std::set<std::string, std::less<>> outer;
  for (auto& n : spec.outer.hole_names()) outer.insert(n);
  for (const auto& c : spec.rule.conditions)
    require_bound({c.hole}, outer, "rule condition");
  for (const auto& nr : spec.rule.rewrites) {
    require_bound({nr.target}, outer, "rewrite target");
    auto inner = outer;
    for (auto& n : nr.match.hole_names()) inner.insert(n);
    require_bound(nr.rewrite.hole_names(), inner, "inner rewrite");
    for (const auto& c : nr.conditions)
      require_bound({c.hole}, inner, "inner condition");
  }
  require_bound(spec.final.hole_names(), outer, "[rewrite]");
  return spec;
}

bool constant_less(const Constant& a, const Constant& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* x = std::get_if<std::int64_t>(&a))
    return *x < std::get<std::int64_t>(b);
  return std::get<std::string>(a) < std::get<std::string>(b);
}

bool Fact::operator<(const Fact& other) const {
  if (relation != other.relation) return relation < other.relation;
  return std::lexicographical_compare(args.begin(), args.end(),
                                      other.args.begin(), other.args.end(),
                                      constant_less);
}

Fact parse_fact_line(std::string_view line) {
  std::size_t i = 0;
  auto fail = [&](const std::string& what) -> MalformedFact {
    return MalformedFact(i, what);
  };
  auto skip = [&] {
    while (i < line.size() && is_space(line[i])) ++i;
  };
  auto expect = [&](char c) {
    skip();
    if (i >= line.size() || line[i] != c)
      throw fail(std::string("expected '") + c + "'");
    ++i;
  };
  skip();
  if (i >= line.size() || !is_name_start(line[i]))
    throw fail("expected a relation name");
  std::size_t b = i;
  while (i < line.size() && is_name_char(line[i])) ++i;
  Fact f{std::string(line.substr(b, i - b)), {}};
  expect('(');
  while (true) {
    skip();
    if (i >= line.size()) throw fail("unexpected end of fact");
    if (line[i] == '"') {
      std::string sym;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\' && i < line.size()) {
          char e = line[i++];
          sym += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          sym += c;
        }
      }
      if (!closed) throw fail("unterminated symbol");
      f.args.emplace_back(std::move(sym));
    } else if (line[i] == '-' || line[i] == '+' || is_digit(line[i])) {
      std::size_t s = i;
      if (line[i] == '-' || line[i] == '+') ++i;
      std::size_t d = i;
      while (i < line.size() && is_digit(line[i])) ++i;
      if (i == d) throw fail("expected digits");
      std::string digits(line.substr(s, i - s));
      try {
        f.args.emplace_back(static_cast<std::int64_t>(std::stoll(digits)));
      } catch (const std::out_of_range&) {
        throw fail("integer out of range");
      }
    } else {
      throw fail("expected a quoted symbol or an integer");
    }
    skip();
    if (i < line.size() && line[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  expect(')');
  expect('.');
  skip();
  if (i != line.size()) throw fail("trailing characters after fact");
  return f;
}

std::string format_constant(const Constant& c) {
  if (const auto* n = std::get_if<std::int64_t>(&c)) return std::to_string(*n);
  std::string out = "\"";
  for (char ch : std::get<std::string>(c)) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

std::string format_fact(const Fact& fact) {
  std::string out = fact.relation + "(";
  for (std::size_t i = 0; i < fact.args.size(); ++i) {
    if (i) out += ", ";
    out += format_constant(fact.args[i]);
  }
  return out + ").";
}

bool FactSet::insert(Fact fact) {
  auto [it, fresh] = arity_.try_emplace(fact.relation, fact.args.size());
  if (!fresh && it->second != fact.args.size())
    throw ArityMismatch("relation " + fact.relation + " has arity " +
                        std::to_string(it->second) + ", got " +
                        std::to_string(fact.args.size()));
  return facts_.insert(std::move(fact)).second;
}

void FactSet::merge(const FactSet& other) {
  for (const auto& f : other.facts_) insert(f);
}

std::size_t FactSet::count(std::string_view relation) const {
  std::size_t n = 0;
  for (const auto& f : facts_) n += f.relation == relation;
  return n;
}

std::vector<std::string> FactSet::relations() const {
  std::vector<std::string> out;
  for (const auto& [name, arity] : arity_) out.push_back(name);
  return out;
}

std::vector<Fact> FactSet::relation(std::string_view name) const {
  std::vector<Fact> out;
  for (const auto& f : facts_)
    if (f.relation == name) out.push_back(f);
  return out;
}

std::string FactSet::to_datalog() const {
  std::string out;
  for (const auto& f : facts_) {
    out += format_fact(f);
    out += '\n';
  }
  return out;
}

std::string escape_tsv(std::string_view field) {
  std::string out;
  for (char c : field) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_tsv(std::string_view field) {
  std::string out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\' && i + 1 < field.size()) {
      char e = field[++i];
      out += e == 't' ? '\t' : e == 'n' ? '\n' : e;
    } else {
      out += field[i];
    }
  }
  return out;
}

std::string FactSet::to_tsv(std::string_view relation) const {
  std::string out;
  for (const auto& f : facts_) {
    if (f.relation != relation) continue;
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (i) out += '\t';
      if (const auto* n = std::get_if<std::int64_t>(&f.args[i]))
        out += std::to_string(*n);
      else
        out += escape_tsv(std::get<std::string>(f.args[i]));
    }
    out += '\n';
  }
  return out;
}

FactSet parse_fact_text(std::string_view text) {
  FactSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = trim(line);
    if (t.empty() || t.starts_with("//")) continue;
    out.insert(parse_fact_line(t));
  }
  return out;
}

GenerationResult generate_facts(const FactSpec& spec,
                                std::span<const SourceFile> files,
                                const GenerationOptions& options) {
  return generate_facts(std::span<const FactSpec>(&spec, 1), files, options);
}

GenerationResult generate_facts(std::span<const FactSpec> specs,
                                std::span<const SourceFile> files,
                                const GenerationOptions& options) {
  for (const auto& spec : specs) options.languages->get(spec.language);
  std::vector<PerFile> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < files.size();)
      results[i] = process_file(specs, files[i], options);
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(
                                   options.jobs,
                                   static_cast<unsigned>(files.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  GenerationResult out;
  for (auto& r : results) {
    for (const auto& f : r.facts.facts()) {
      try {
        out.facts.insert(f);
      } catch (const ArityMismatch& e) {
        out.diagnostics.push_back({r.stats.path, 0, e.what()});
      }
    }
    out.files.push_back(std::move(r.stats));
    for (auto& d : r.diagnostics) out.diagnostics.push_back(std::move(d));
  }
  return out;
}

}  // namespace factlog
