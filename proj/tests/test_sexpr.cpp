#include "dmc/error.hpp"
#include "dmc/sexpr.hpp"
#include "test_util.hpp"

using namespace dmc;

TEST_CASE("atoms and lists parse") {
  SExpr a = parse_sexpr("hello");
  CHECK(a.atom);
  CHECK(a.text == "hello");

  SExpr e = parse_sexpr("(E 1 2)");
  REQUIRE(e.is_list());
  REQUIRE(e.size() == 3);
  CHECK(e[0].text == "E");
  CHECK(e[1].text == "1");
  CHECK(e[2].text == "2");

  SExpr n = parse_sexpr("((a) (b (c)) ())");
  REQUIRE(n.size() == 3);
  CHECK(n[0].size() == 1);
  CHECK(n[1][1][0].text == "c");
  CHECK(n[2].size() == 0);
}

TEST_CASE("whitespace and comments are insignificant") {
  SExpr e = parse_sexpr("  ( M ; measure\n   5\t pi/2 ) ; done\n");
  REQUIRE(e.size() == 3);
  CHECK(e[0].text == "M");
  CHECK(e[1].text == "5");
  CHECK(e[2].text == "pi/2");

  // a comment terminates an atom
  SExpr f = parse_sexpr("(a;comment\nb)");
  REQUIRE(f.size() == 2);
  CHECK(f[0].text == "a");
  CHECK(f[1].text == "b");
}

TEST_CASE("canonical printing uses single spaces") {
  CHECK(print_sexpr(parse_sexpr("( a  ( b   c )\n d )")) == "(a (b c) d)");
  CHECK(print_sexpr(parse_sexpr("()")) == "()");
  CHECK(print_sexpr(parse_sexpr("x")) == "x");
}

TEST_CASE("print/parse round-trips") {
  const char* samples[] = {
      "(E ?i ?o)",
      "((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))",
      "(M 3 1.5707963267948966 (+ (s 1) (s 2)) v)",
      "(() () () ())",
  };
  for (const char* s : samples) {
    SExpr e = parse_sexpr(s);
    CHECK(print_sexpr(e) == s);
    CHECK(parse_sexpr(print_sexpr(e)) == e);
  }
}

TEST_CASE("parse errors carry the right code") {
  CHECK(code_of([] { parse_sexpr("(a (b)"); }) == Errc::UnbalancedParens);
  CHECK(code_of([] { parse_sexpr(")"); }) == Errc::UnbalancedParens);
  CHECK(code_of([] { parse_sexpr("(a) b"); }) == Errc::TrailingInput);
  CHECK(code_of([] { parse_sexpr("(a) (b)"); }) == Errc::TrailingInput);
  CHECK(code_of([] { parse_sexpr(""); }) == Errc::EmptyInput);
  CHECK(code_of([] { parse_sexpr("  ; only a comment\n"); }) == Errc::EmptyInput);
}

TEST_CASE("parse_sexprs reads a whole stream") {
  auto forms = parse_sexprs("(a) ; first\n(b c)\natom");
  REQUIRE(forms.size() == 3);
  CHECK(print_sexpr(forms[0]) == "(a)");
  CHECK(print_sexpr(forms[1]) == "(b c)");
  CHECK(forms[2].text == "atom");

  CHECK(parse_sexprs("").empty());
  CHECK(parse_sexprs(" ; nothing\n").empty());
  CHECK(code_of([] { parse_sexprs("(a"); }) == Errc::UnbalancedParens);
}

TEST_CASE("equality is structural") {
  CHECK(parse_sexpr("(a b)") == parse_sexpr(" (a  b )"));
  CHECK(parse_sexpr("(a b)") != parse_sexpr("(a (b))"));
  CHECK(parse_sexpr("x") != parse_sexpr("(x)"));
}
