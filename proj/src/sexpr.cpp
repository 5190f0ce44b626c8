#include "dmc/sexpr.hpp"

#include <cctype>

#include "dmc/error.hpp"

namespace dmc {

namespace {

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_space_and_comments() {
    while (!done()) {
      char c = text[pos];
      if (c == ';') {
        while (!done() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  SExpr parse_form() {
    skip_space_and_comments();
    if (done()) fail(Errc::UnbalancedParens, "unexpected end of input at byte " +
                                                 std::to_string(pos));
    char c = peek();
    if (c == '(') {
      ++pos;
      SExpr list = SExpr::make_list();
      while (true) {
        skip_space_and_comments();
        if (done())
          fail(Errc::UnbalancedParens,
               "missing ')' before end of input (opened list not closed)");
        if (peek() == ')') {
          ++pos;
          return list;
        }
        list.items.push_back(parse_form());
      }
    }
    if (c == ')')
      fail(Errc::UnbalancedParens,
           "unexpected ')' at byte " + std::to_string(pos));
    // atom: run of non-space, non-paren, non-comment characters
    size_t start = pos;
    while (!done()) {
      char a = text[pos];
      if (a == '(' || a == ')' || a == ';' ||
          std::isspace(static_cast<unsigned char>(a)))
        break;
      ++pos;
    }
    return SExpr::make_atom(std::string(text.substr(start, pos - start)));
  }
};

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Cursor cur{text};
  cur.skip_space_and_comments();
  if (cur.done()) fail(Errc::EmptyInput, "no s-expression found");
  SExpr e = cur.parse_form();
  cur.skip_space_and_comments();
  if (!cur.done())
    fail(Errc::TrailingInput,
         "unexpected trailing input at byte " + std::to_string(cur.pos));
  return e;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Cursor cur{text};
  std::vector<SExpr> forms;
  while (true) {
    cur.skip_space_and_comments();
    if (cur.done()) break;
    forms.push_back(cur.parse_form());
  }
  return forms;
}

static void print_into(const SExpr& e, std::string& out) {
  if (e.atom) {
    out += e.text;
    return;
  }
  out += '(';
  for (size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    print_into(e.items[i], out);
  }
  out += ')';
}

std::string print_sexpr(const SExpr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

}  // namespace dmc
