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

#include <doctest.h>

#include <string>
#include <vector>

#include "factlog/error.hpp"
#include "factlog/template.hpp"

using namespace factlog;

namespace {

const LanguageDefinition& lang(const char* n) {
  return LanguageRegistry::builtin().get(n);
}

std::vector<Match> find(const char* templ, const std::string& src,
                        const char* language = "go") {
  auto map = classify(src, lang(language));
  return match_all(parse_template(templ), map);
}

std::string bound(const Match& m, const char* name) {
  return m.env.at(name).text;
}

const char* kExample =
    "package main\n\nimport \"fmt\"\n\nfunc one() int {\n  return 1\n}\n\n"
    "func incr(n int) int {\n  return n + one()\n}\n\nfunc main() {\n"
    "  fmt.Printf(\"%d\\n\", incr(one()))\n}\n";

}  // namespace

TEST_SUITE("template") {

TEST_CASE("parse liveness template") {
  auto t = parse_template("$x = $y + $z");
  std::vector<TemplateAtom> want = {
      Hole{"x", HoleKind::Expression}, Literal{" = "},
      Hole{"y", HoleKind::Expression}, Literal{" + "},
      Hole{"z", HoleKind::Expression}};
  CHECK(t.atoms == want);
}

TEST_CASE("parse function template") {
  auto t = parse_template("func $f(...) $r? {$body*}");
  std::vector<TemplateAtom> want = {
      Literal{"func "}, Hole{"f", HoleKind::Expression}, Literal{"("},
      Hole{"", HoleKind::Anonymous}, Literal{") "},
      Hole{"r", HoleKind::Optional}, Literal{" {"},
      Hole{"body", HoleKind::Everything}, Literal{"}"}};
  CHECK(t.atoms == want);
  CHECK(t.hole_names() == std::vector<std::string>{"f", "r", "body"});
}

TEST_CASE("parse edge cases") {
  CHECK(parse_template("").empty());
  CHECK(parse_template("\"$s\"").atoms.size() == 3);
  CHECK(std::get<Hole>(parse_template("\"$s\"").atoms[1]).kind ==
        HoleKind::StringBody);
  CHECK(parse_template("f(..., ...)").hole_names().empty());
  CHECK_THROWS_AS(parse_template("$ x"), MalformedHole);
  CHECK_THROWS_AS(parse_template("$1"), MalformedHole);
  CHECK_THROWS_AS(parse_template("$x + $x"), DuplicateHoleName);
}

TEST_CASE("liveness match binds and locates") {
  auto ms = find("$x = $y + $z", "a = b + c", "arith");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "x") == "a");
  CHECK(bound(ms[0], "y") == "b");
  CHECK(bound(ms[0], "z") == "c");
  CHECK(ms[0].env.at("x").line == 1);
  CHECK(ms[0].env.at("z").column == 9);
}

TEST_CASE("liveness match on the four-line program") {
  auto ms = find("$x = $y + $z", "a = b + c\nb = a - d\nc = b + c\nhalt\n", "arith");
  REQUIRE(ms.size() == 2);
  CHECK(ms[1].env.at("x").line == 3);
  auto minus = find("$x = $y - $z", "a = b + c\nb = a - d\nc = b + c\nhalt\n", "arith");
  REQUIRE(minus.size() == 1);
  CHECK(bound(minus[0], "y") == "a");
  CHECK(minus[0].env.at("x").line == 2);
}

TEST_CASE("function template over the worked Go example") {
  auto ms = find("func $f(...) $r? {$body*}", kExample);
  REQUIRE(ms.size() == 3);
  CHECK(bound(ms[0], "f") == "one");
  CHECK(bound(ms[1], "f") == "incr");
  CHECK(bound(ms[2], "f") == "main");
  CHECK(bound(ms[0], "r") == "int");
  CHECK(bound(ms[1], "r") == "int");
  CHECK(bound(ms[2], "r") == "");
  CHECK(bound(ms[1], "body").find("return n + one()") != std::string::npos);
}

TEST_CASE("no anchor, no match") { CHECK(find("foo($a)", "bar(1)").empty()); }

TEST_CASE("expression hole binds qualified names and calls whole") {
  auto ms = find("$c(...)", "fmt.Printf(\"x\", incr(one()))");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "c") == "fmt.Printf");
  auto arg = find("x := $v", "x := one()");
  REQUIRE(arg.size() == 1);
  CHECK(bound(arg[0], "v") == "one()");
}

TEST_CASE("expression hole may bind a string literal") {
  auto ms = find("print($s)", "print(\"a b\")");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "s") == "\"a b\"");
}

TEST_CASE("everything hole stops at the following literal at depth zero") {
  auto ms = find("{$b*}", "{ if x { y() } z }");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "b") == " if x { y() } z ");
}

TEST_CASE("everything hole crosses comments and braces in strings") {
  auto ms = find("f() {$b*}", "f() { // }\n s := \"}\"\n}");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "b") == " // }\n s := \"}\"\n");
}

TEST_CASE("string body hole") {
  auto ms = find("log(\"$m\")", "log(\"hi (there\")");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "m") == "hi (there");
}

TEST_CASE("matches never start inside comments or strings") {
  CHECK(find("$c(...)", "// f(x)\n\"g(y)\"").empty());
  auto ms = find("$c(...)", "/* a(b) */ h(1)");
  REQUIRE(ms.size() == 1);
  CHECK(bound(ms[0], "c") == "h");
}

TEST_CASE("matches are non-overlapping and ordered") {
  auto ms = find("$c(...)", "a(b(c())) d()");
  REQUIRE(ms.size() == 2);
  CHECK(bound(ms[0], "c") == "a");
  CHECK(bound(ms[1], "c") == "d");
  CHECK(ms[0].end <= ms[1].begin);
}

TEST_CASE("identifier boundaries are respected") {
  CHECK(find("func $f()", "myfunc x()").empty());
  CHECK(find("go($a)", "ergo(1)").empty());
}

TEST_CASE("bindings reproduce the source text") {
  std::string src = kExample;
  auto map = classify(src, lang("go"));
  for (const auto& m : match_all(parse_template("$c(...)"), map)) {
    for (const auto& [name, b] : m.env.bindings) {
      CHECK(src.substr(b.begin, b.end - b.begin) == b.text);
      CHECK(b.begin >= m.begin);
      CHECK(b.end <= m.end);
      auto pos = map.position(b.begin);
      CHECK(pos.line == b.line);
      CHECK(pos.column == b.column);
    }
  }
}

TEST_CASE("restricted range and filter") {
  std::string src = "a() b() c()";
  auto map = classify(src, lang("go"));
  auto t = parse_template("$f()");
  auto ms = match_all(t, map, 4, src.size(),
                      [](const Match& m) { return m.env.at("f").text != "b"; });
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].env.at("f").text == "c");
}

TEST_CASE("get_property") {
  auto ms = find("$x = $y + $z", "\n  a = b + c", "arith");
  REQUIRE(ms.size() == 1);
  CHECK(get_property(ms[0].env, "x", Property::Line) == Constant{std::int64_t{2}});
  CHECK(get_property(ms[0].env, "x", Property::Column) == Constant{std::int64_t{3}});
  CHECK(get_property(ms[0].env, "x", Property::Value) == Constant{std::string("a")});
  CHECK_THROWS_AS(get_property(ms[0].env, "q", Property::Line), UnboundHole);
}

TEST_CASE("matching is deterministic") {
  auto a = find("$c(...)", kExample);
  auto b = find("$c(...)", kExample);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].begin == b[i].begin);
    CHECK(a[i].end == b[i].end);
  }
}

}
