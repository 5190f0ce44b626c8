#include "dmc/pattern.hpp"

#include <algorithm>
#include <set>

#include "dmc/error.hpp"

namespace dmc {

bool Pattern::distributed() const {
  return std::any_of(commands.begin(), commands.end(),
                     [](const Command& c) { return c.communication(); });
}

namespace {
bool contains(const std::vector<QName>& xs, const QName& q) {
  return std::find(xs.begin(), xs.end(), q) != xs.end();
}

void check_duplicates(const std::vector<QName>& xs, const char* which,
                      std::vector<std::string>& out) {
  std::set<QName> seen;
  for (const QName& q : xs)
    if (!seen.insert(q).second)
      out.push_back(std::string("duplicate name ") + qname_str(q) + " in " + which);
}

void signal_qubits(const SignalExpr& s, std::vector<QName>& out) {
  if (s.kind == SignalExpr::Kind::Outcome) out.push_back(s.qubit);
  if (s.kind == SignalExpr::Kind::Sum)
    for (const SignalExpr& t : s.terms) signal_qubits(t, out);
}
}  // namespace

std::vector<std::string> validate_pattern(const Pattern& p,
                                          bool allow_distributed) {
  std::vector<std::string> out;
  check_duplicates(p.space, "the computation space", out);
  check_duplicates(p.inputs, "the input list", out);
  check_duplicates(p.outputs, "the output list", out);

  for (const QName& q : p.inputs)
    if (!contains(p.space, q))
      out.push_back("input " + qname_str(q) + " is not in the computation space");
  for (const QName& q : p.outputs)
    if (!contains(p.space, q))
      out.push_back("output " + qname_str(q) + " is not in the computation space");

  bool any_concrete = false, any_var = false;
  for (const QName& q : p.space) (is_concrete(q) ? any_concrete : any_var) = true;
  if (any_concrete && any_var)
    out.push_back("computation space mixes concrete references and variables");

  std::set<std::string> params(p.params.begin(), p.params.end());
  std::set<QName> measured;
  std::set<QName> measured_so_far;

  auto check_ref = [&](const QName& q, const std::string& what) {
    if (!contains(p.space, q))
      out.push_back(what + " references " + qname_str(q) +
                    ", which is not in the computation space");
    if (measured_so_far.count(q))
      out.push_back(what + " touches " + qname_str(q) + " after its measurement");
  };
  auto check_signal = [&](const SignalExpr& s, const std::string& what) {
    std::vector<QName> qs;
    signal_qubits(s, qs);
    for (const QName& q : qs) {
      if (!contains(p.space, q))
        out.push_back(what + " reads an outcome of " + qname_str(q) +
                      ", which is not in the computation space");
      else if (!measured_so_far.count(q))
        out.push_back(what + " reads the outcome of " + qname_str(q) +
                      " before it is measured");
    }
  };

  for (size_t i = 0; i < p.commands.size(); ++i) {
    const Command& c = p.commands[i];
    std::string what = "command " + std::to_string(i + 1) + " " +
                       print_sexpr(command_to_sexpr(c));
    switch (c.op) {
      case Command::Op::Entangle:
        if (c.q1 == c.q2)
          out.push_back(what + " entangles a qubit with itself");
        check_ref(c.q1, what);
        check_ref(c.q2, what);
        break;
      case Command::Op::Measure:
        check_ref(c.q1, what);
        if (c.sig1) check_signal(*c.sig1, what);
        if (c.sig2) check_signal(*c.sig2, what);
        if (c.angle.symbolic() && !params.count(c.angle.param))
          out.push_back(what + " uses undeclared angle parameter " +
                        c.angle.param);
        if (measured.count(c.q1))
          out.push_back(what + " measures " + qname_str(c.q1) + " again");
        measured.insert(c.q1);
        measured_so_far.insert(c.q1);
        break;
      case Command::Op::CorrectX:
      case Command::Op::CorrectZ:
        check_ref(c.q1, what);
        if (c.sig1) check_signal(*c.sig1, what);
        break;
      case Command::Op::QSend:
      case Command::Op::QRecv:
        if (!allow_distributed) {
          out.push_back(what + " is a communication command in a local pattern");
          break;
        }
        check_ref(c.q1, what);
        break;
      case Command::Op::Send:
      case Command::Op::Recv:
        if (!allow_distributed)
          out.push_back(what + " is a communication command in a local pattern");
        else if (c.op == Command::Op::Send && c.sig1)
          check_signal(*c.sig1, what);
        break;
    }
  }

  for (const QName& q : p.space) {
    bool is_out = contains(p.outputs, q);
    bool is_meas = measured.count(q) > 0;
    if (is_out && is_meas)
      out.push_back("output " + qname_str(q) + " is measured");
    if (!is_out && !is_meas)
      out.push_back("non-output " + qname_str(q) + " is never measured");
  }
  return out;
}

namespace {
struct Assembler {
  FreshAlloc& alloc;
  std::set<std::int64_t> concrete;
  std::map<std::string, std::int64_t> naming;

  std::int64_t map_name(const QName& q) {
    if (is_concrete(q)) return qref(q);
    const std::string& v = std::get<std::string>(q);
    auto it = naming.find(v);
    if (it != naming.end()) return it->second;
    std::int64_t r = alloc.alloc();
    if (concrete.count(r))
      fail(Errc::NameCollision,
           "fresh reference " + std::to_string(r) +
               " collides with a concrete reference in the pattern");
    naming[v] = r;
    return r;
  }

  void map_signal(SignalExpr& s) {
    if (s.kind == SignalExpr::Kind::Outcome) s.qubit = QName{map_name(s.qubit)};
    if (s.kind == SignalExpr::Kind::Sum)
      for (SignalExpr& t : s.terms) map_signal(t);
  }
};
}  // namespace

AssembledPattern assemble(const Pattern& p, FreshAlloc& alloc) {
  Assembler as{alloc, {}, {}};
  auto collect = [&](const QName& q) {
    if (is_concrete(q)) as.concrete.insert(qref(q));
  };
  for (const QName& q : p.space) collect(q);
  for (const Command& c : p.commands) {
    collect(c.q1);
    if (c.op == Command::Op::Entangle) collect(c.q2);
    std::vector<QName> qs;
    if (c.sig1) signal_qubits(*c.sig1, qs);
    if (c.sig2) signal_qubits(*c.sig2, qs);
    for (const QName& q : qs) collect(q);
  }

  AssembledPattern out;
  for (const QName& q : p.space) out.space.push_back(as.map_name(q));
  for (const QName& q : p.inputs) out.inputs.push_back(as.map_name(q));
  for (const QName& q : p.outputs) out.outputs.push_back(as.map_name(q));

  for (Command c : p.commands) {
    c.q1 = QName{as.map_name(c.q1)};
    if (c.op == Command::Op::Entangle) c.q2 = QName{as.map_name(c.q2)};
    if (c.sig1) as.map_signal(*c.sig1);
    if (c.sig2) as.map_signal(*c.sig2);
    out.commands.push_back(std::move(c));
  }
  out.naming = std::move(as.naming);
  return out;
}

Pattern instantiate_params(const Pattern& p,
                           const std::map<std::string, double>& values) {
  std::set<std::string> declared(p.params.begin(), p.params.end());
  for (const auto& [k, v] : values) {
    (void)v;
    if (!declared.count(k))
      fail(Errc::UnknownParam, "pattern has no angle parameter " + k);
  }
  for (const std::string& k : p.params)
    if (!values.count(k))
      fail(Errc::MissingParam, "no value given for angle parameter " + k);

  Pattern out = p;
  out.params.clear();
  for (Command& c : out.commands) {
    if (c.op == Command::Op::Measure && c.angle.symbolic()) {
      auto it = values.find(c.angle.param);
      if (it == values.end())
        fail(Errc::MissingParam, "no value for parameter " + c.angle.param);
      c.angle = Angle{normalize_angle(it->second), ""};
    }
  }
  return out;
}

std::vector<QName> parse_name_list(const SExpr& e) {
  if (e.atom)
    fail(Errc::ShapeError, "expected a list of qubit names, got " + e.text);
  std::vector<QName> out;
  out.reserve(e.items.size());
  for (const SExpr& item : e.items) out.push_back(parse_qname(item));
  return out;
}

SExpr name_list_to_sexpr(const std::vector<QName>& names) {
  std::vector<SExpr> items;
  items.reserve(names.size());
  for (const QName& q : names) items.push_back(qname_to_sexpr(q));
  return SExpr::make_list(std::move(items));
}

Pattern parse_pattern_body(const SExpr& v, const SExpr& i, const SExpr& o,
                           const SExpr& cmds, const CommandParseOptions& opts) {
  Pattern p;
  p.space = parse_name_list(v);
  p.inputs = parse_name_list(i);
  p.outputs = parse_name_list(o);
  p.commands = parse_command_sequence(cmds, opts);
  return p;
}

Pattern parse_pattern_def(const SExpr& e) {
  if (e.atom || e.items.size() != 4)
    fail(Errc::ShapeError,
         "pattern definition must be (V I O COMMANDS): " + print_sexpr(e));
  return parse_pattern_body(e.items[0], e.items[1], e.items[2], e.items[3], {});
}

SExpr pattern_to_sexpr(const Pattern& p) {
  return SExpr::make_list({name_list_to_sexpr(p.space),
                           name_list_to_sexpr(p.inputs),
                           name_list_to_sexpr(p.outputs),
                           command_sequence_to_sexpr(p.commands)});
}

}  // namespace dmc
