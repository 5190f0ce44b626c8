#include "dmc/command.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dmc/error.hpp"

namespace dmc {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_variable(const std::string& s) { return s.size() > 1 && s[0] == '?'; }

bool is_identifier(const std::string& s) {
  if (s.empty() || all_digits(s)) return false;
  for (char c : s)
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
      return false;
  return true;
}
}  // namespace

std::string qname_str(const QName& q) {
  if (is_concrete(q)) return std::to_string(qref(q));
  return std::get<std::string>(q);
}

QName qn(std::int64_t v) { return QName{v}; }
QName qn(std::string v) { return QName{std::move(v)}; }

SignalExpr SignalExpr::constant(int bit) {
  SignalExpr s;
  s.kind = Kind::Const;
  s.value = bit;
  return s;
}
SignalExpr SignalExpr::outcome(QName q) {
  SignalExpr s;
  s.kind = Kind::Outcome;
  s.qubit = std::move(q);
  return s;
}
SignalExpr SignalExpr::input_ref(std::string name) {
  SignalExpr s;
  s.kind = Kind::Input;
  s.input = std::move(name);
  return s;
}
SignalExpr SignalExpr::sum(std::vector<SignalExpr> ts) {
  SignalExpr s;
  s.kind = Kind::Sum;
  s.terms = std::move(ts);
  return s;
}

bool SignalExpr::operator==(const SignalExpr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Const: return value == o.value;
    case Kind::Outcome: return qubit == o.qubit;
    case Kind::Input: return input == o.input;
    case Kind::Sum: return terms == o.terms;
  }
  return false;
}

double normalize_angle(double radians) {
  double two_pi = 2.0 * kPi;
  double r = std::fmod(radians, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0.0;  // guard the fmod edge
  return r;
}

bool Command::operator==(const Command& o) const {
  return op == o.op && q1 == o.q1 && q2 == o.q2 && angle == o.angle &&
         sig1 == o.sig1 && sig2 == o.sig2 && channel == o.channel &&
         binding == o.binding;
}

Command cmd_e(QName a, QName b) {
  Command c;
  c.op = Command::Op::Entangle;
  c.q1 = std::move(a);
  c.q2 = std::move(b);
  return c;
}
Command cmd_m(QName q, Angle angle, std::optional<SignalExpr> s,
              std::optional<SignalExpr> t) {
  Command c;
  c.op = Command::Op::Measure;
  c.q1 = std::move(q);
  c.angle = std::move(angle);
  c.sig1 = std::move(s);
  c.sig2 = std::move(t);
  return c;
}
Command cmd_x(QName q, std::optional<SignalExpr> sig) {
  Command c;
  c.op = Command::Op::CorrectX;
  c.q1 = std::move(q);
  c.sig1 = std::move(sig);
  return c;
}
Command cmd_z(QName q, std::optional<SignalExpr> sig) {
  Command c;
  c.op = Command::Op::CorrectZ;
  c.q1 = std::move(q);
  c.sig1 = std::move(sig);
  return c;
}
Command cmd_send(std::string ch, SignalExpr sig) {
  Command c;
  c.op = Command::Op::Send;
  c.channel = std::move(ch);
  c.sig1 = std::move(sig);
  return c;
}
Command cmd_recv(std::string ch, std::string name) {
  Command c;
  c.op = Command::Op::Recv;
  c.channel = std::move(ch);
  c.binding = std::move(name);
  return c;
}
Command cmd_qsend(std::string ch, QName q) {
  Command c;
  c.op = Command::Op::QSend;
  c.channel = std::move(ch);
  c.q1 = std::move(q);
  return c;
}
Command cmd_qrecv(std::string ch, QName q) {
  Command c;
  c.op = Command::Op::QRecv;
  c.channel = std::move(ch);
  c.q1 = std::move(q);
  return c;
}

QName parse_qname(const SExpr& e) {
  if (!e.atom)
    fail(Errc::MixedNameKind, "qubit name must be an atom: " + print_sexpr(e));
  if (all_digits(e.text)) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(e.text.c_str(), &end, 10);
    if (errno != 0 || *end != '\0')
      fail(Errc::MixedNameKind, "bad qubit reference: " + e.text);
    return QName{static_cast<std::int64_t>(v)};
  }
  if (is_variable(e.text)) return QName{e.text};
  fail(Errc::MixedNameKind,
       "qubit name must be a non-negative integer or a ?-variable: " + e.text);
}

SignalExpr parse_signal(const SExpr& e) {
  if (e.atom) {
    if (e.text == "0") return SignalExpr::constant(0);
    if (e.text == "1") return SignalExpr::constant(1);
    if (is_identifier(e.text)) return SignalExpr::input_ref(e.text);
    fail(Errc::BadSignal, "bad signal atom: " + e.text);
  }
  if (e.items.empty() || !e.items[0].atom)
    fail(Errc::BadSignal, "bad signal: " + print_sexpr(e));
  const std::string& head = e.items[0].text;
  if (head == "s") {
    if (e.items.size() != 2)
      fail(Errc::BadSignal, "(s q) takes one qubit: " + print_sexpr(e));
    return SignalExpr::outcome(parse_qname(e.items[1]));
  }
  if (head == "+") {
    if (e.items.size() < 2)
      fail(Errc::BadSignal, "(+ ...) needs at least one term: " + print_sexpr(e));
    std::vector<SignalExpr> terms;
    for (size_t i = 1; i < e.items.size(); ++i)
      terms.push_back(parse_signal(e.items[i]));
    return SignalExpr::sum(std::move(terms));
  }
  fail(Errc::BadSignal, "bad signal operator: " + print_sexpr(e));
}

namespace {
// "pi", "pi/2", "pi/4", "-pi/2", ... ; returns false if not a pi form.
bool parse_pi_form(const std::string& t, double* out) {
  std::string s = t;
  double sign = 1.0;
  if (!s.empty() && s[0] == '-') {
    sign = -1.0;
    s = s.substr(1);
  }
  if (s.rfind("pi", 0) != 0) return false;
  std::string rest = s.substr(2);
  if (rest.empty()) {
    *out = sign * kPi;
    return true;
  }
  if (rest[0] != '/' || rest.size() < 2 || !all_digits(rest.substr(1)))
    return false;
  double denom = std::atof(rest.c_str() + 1);
  if (denom == 0) return false;
  *out = sign * kPi / denom;
  return true;
}

bool parse_decimal(const std::string& t, double* out) {
  if (t.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}
}  // namespace

Angle parse_angle(const SExpr& e, const CommandParseOptions& opts) {
  if (!e.atom) fail(Errc::BadAngle, "angle must be an atom: " + print_sexpr(e));
  double v = 0;
  if (parse_pi_form(e.text, &v) || parse_decimal(e.text, &v)) {
    Angle a;
    a.value = normalize_angle(v);
    return a;
  }
  if (opts.allow_params && is_identifier(e.text) && e.text[0] != '?') {
    Angle a;
    a.param = e.text;
    return a;
  }
  fail(Errc::BadAngle, "bad angle literal: " + e.text);
}

namespace {
std::string parse_channel(const SExpr& e) {
  if (!e.atom || !is_identifier(e.text))
    fail(Errc::BadName, "channel must be an identifier: " + print_sexpr(e));
  return e.text;
}

std::string parse_input_name(const SExpr& e) {
  if (!e.atom || !is_identifier(e.text))
    fail(Errc::BadName, "input name must be an identifier: " + print_sexpr(e));
  return e.text;
}

void require_arity(const SExpr& e, size_t lo, size_t hi) {
  if (e.items.size() < lo || e.items.size() > hi)
    fail(Errc::ArityError, "wrong arity: " + print_sexpr(e));
}
}  // namespace

Command parse_command(const SExpr& e, const CommandParseOptions& opts) {
  if (e.atom || e.items.empty() || !e.items[0].atom)
    fail(Errc::ShapeError, "command must be a non-empty list: " + print_sexpr(e));
  std::string head = e.items[0].text;  // operator tokens are case-insensitive
  for (char& ch : head) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));

  if (head == "E") {
    require_arity(e, 3, 3);
    return cmd_e(parse_qname(e.items[1]), parse_qname(e.items[2]));
  }
  if (head == "M") {
    require_arity(e, 3, 5);
    std::optional<SignalExpr> s, t;
    if (e.items.size() >= 4) s = parse_signal(e.items[3]);
    if (e.items.size() == 5) t = parse_signal(e.items[4]);
    return cmd_m(parse_qname(e.items[1]), parse_angle(e.items[2], opts),
                 std::move(s), std::move(t));
  }
  if (head == "X" || head == "Z" || head == "Y") {
    require_arity(e, 2, 3);
    std::optional<SignalExpr> sig;
    if (e.items.size() == 3) sig = parse_signal(e.items[2]);
    if (head == "X") return cmd_x(parse_qname(e.items[1]), std::move(sig));
    if (head == "Y" && opts.warnings)
      opts.warnings->push_back(
          "Y correction on " + print_sexpr(e.items[1]) +
          " applied as Z (Y = XZ up to phase; X is absorbed by the basis)");
    return cmd_z(parse_qname(e.items[1]), std::move(sig));
  }

  bool distributed = head == "SEND" || head == "RECV" || head == "QSEND" ||
                     head == "QRECV";
  if (distributed && !opts.allow_distributed)
    fail(Errc::DistributedOpInLocalContext,
         "communication command in a local context: " + print_sexpr(e));
  if (head == "SEND") {
    require_arity(e, 3, 3);
    return cmd_send(parse_channel(e.items[1]), parse_signal(e.items[2]));
  }
  if (head == "RECV") {
    require_arity(e, 3, 3);
    return cmd_recv(parse_channel(e.items[1]), parse_input_name(e.items[2]));
  }
  if (head == "QSEND") {
    require_arity(e, 3, 3);
    return cmd_qsend(parse_channel(e.items[1]), parse_qname(e.items[2]));
  }
  if (head == "QRECV") {
    require_arity(e, 3, 3);
    return cmd_qrecv(parse_channel(e.items[1]), parse_qname(e.items[2]));
  }
  fail(Errc::UnknownOperator, "unknown command operator: " + head);
}

std::vector<Command> parse_command_sequence(const SExpr& list,
                                            const CommandParseOptions& opts) {
  if (list.atom)
    fail(Errc::ShapeError, "command sequence must be a list: " + list.text);
  std::vector<Command> out;
  out.reserve(list.items.size());
  for (const SExpr& item : list.items) out.push_back(parse_command(item, opts));
  return out;
}

std::string format_double_exact(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

SExpr qname_to_sexpr(const QName& q) { return SExpr::make_atom(qname_str(q)); }

SExpr signal_to_sexpr(const SignalExpr& s) {
  switch (s.kind) {
    case SignalExpr::Kind::Const:
      return SExpr::make_atom(std::to_string(s.value));
    case SignalExpr::Kind::Outcome:
      return SExpr::make_list({SExpr::make_atom("s"), qname_to_sexpr(s.qubit)});
    case SignalExpr::Kind::Input:
      return SExpr::make_atom(s.input);
    case SignalExpr::Kind::Sum: {
      std::vector<SExpr> items{SExpr::make_atom("+")};
      for (const auto& t : s.terms) items.push_back(signal_to_sexpr(t));
      return SExpr::make_list(std::move(items));
    }
  }
  return SExpr::make_atom("0");
}

SExpr angle_to_sexpr(const Angle& a) {
  if (a.symbolic()) return SExpr::make_atom(a.param);
  return SExpr::make_atom(format_double_exact(a.value));
}

SExpr command_to_sexpr(const Command& c) {
  using Op = Command::Op;
  switch (c.op) {
    case Op::Entangle:
      return SExpr::make_list(
          {SExpr::make_atom("E"), qname_to_sexpr(c.q1), qname_to_sexpr(c.q2)});
    case Op::Measure: {
      std::vector<SExpr> items{SExpr::make_atom("M"), qname_to_sexpr(c.q1),
                               angle_to_sexpr(c.angle)};
      if (c.sig1 || c.sig2)
        items.push_back(signal_to_sexpr(c.sig1 ? *c.sig1
                                               : SignalExpr::constant(0)));
      if (c.sig2) items.push_back(signal_to_sexpr(*c.sig2));
      return SExpr::make_list(std::move(items));
    }
    case Op::CorrectX:
    case Op::CorrectZ: {
      std::vector<SExpr> items{
          SExpr::make_atom(c.op == Op::CorrectX ? "X" : "Z"),
          qname_to_sexpr(c.q1)};
      if (c.sig1) items.push_back(signal_to_sexpr(*c.sig1));
      return SExpr::make_list(std::move(items));
    }
    case Op::Send:
      return SExpr::make_list({SExpr::make_atom("send"),
                               SExpr::make_atom(c.channel),
                               signal_to_sexpr(*c.sig1)});
    case Op::Recv:
      return SExpr::make_list({SExpr::make_atom("recv"),
                               SExpr::make_atom(c.channel),
                               SExpr::make_atom(c.binding)});
    case Op::QSend:
      return SExpr::make_list({SExpr::make_atom("qsend"),
                               SExpr::make_atom(c.channel),
                               qname_to_sexpr(c.q1)});
    case Op::QRecv:
      return SExpr::make_list({SExpr::make_atom("qrecv"),
                               SExpr::make_atom(c.channel),
                               qname_to_sexpr(c.q1)});
  }
  fail(Errc::ShapeError, "unprintable command");
}

SExpr command_sequence_to_sexpr(const std::vector<Command>& cs) {
  std::vector<SExpr> items;
  items.reserve(cs.size());
  for (const Command& c : cs) items.push_back(command_to_sexpr(c));
  return SExpr::make_list(std::move(items));
}

}  // namespace dmc
