#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dmc {

// Plain s-expression tree: an atom (token text, verbatim) or a list.
struct SExpr {
  bool atom = false;
  std::string text;          // atom payload
  std::vector<SExpr> items;  // list payload

  static SExpr make_atom(std::string t) {
    SExpr e;
    e.atom = true;
    e.text = std::move(t);
    return e;
  }
  static SExpr make_list(std::vector<SExpr> xs = {}) {
    SExpr e;
    e.items = std::move(xs);
    return e;
  }

  bool operator==(const SExpr& o) const {
    if (atom != o.atom) return false;
    if (atom) return text == o.text;
    return items == o.items;
  }
  bool operator!=(const SExpr& o) const { return !(*this == o); }

  bool is_list() const { return !atom; }
  size_t size() const { return items.size(); }
  const SExpr& operator[](size_t i) const { return items[i]; }
};

// Parse exactly one toplevel form; trailing non-comment input is an error.
SExpr parse_sexpr(std::string_view text);

// Parse zero or more toplevel forms (e.g. the contents of a definition file).
std::vector<SExpr> parse_sexprs(std::string_view text);

// Canonical printing: single spaces, no trailing whitespace.
std::string print_sexpr(const SExpr& e);

}  // namespace dmc
