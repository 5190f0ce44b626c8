#include "dmc/protocols.hpp"

#include <algorithm>

#include "dmc/error.hpp"
#include "dmc/sexpr.hpp"

namespace dmc {

namespace {
QName var(const std::string& s) { return QName{"?" + s}; }
QName var(const std::string& s, int i) { return var(s + std::to_string(i)); }

SignalExpr s_of(const QName& q) { return SignalExpr::outcome(q); }

// teleport `in` through a fresh CZ onto `out`, realizing a Hadamard
std::vector<Command> h_sub(const QName& in, const QName& out) {
  return {cmd_e(in, out), cmd_m(in, Angle{}), cmd_x(out, s_of(in))};
}

// GHZ-basis measurement over qs[0..m-1]; hats[k-1] is the helper for qs[k]
std::vector<Command> mghz_cmds(const std::vector<QName>& qs,
                               const std::vector<QName>& hats) {
  std::vector<Command> cmds;
  for (size_t k = qs.size() - 1; k >= 1; --k) {
    for (Command& c : h_sub(qs[k], hats[k - 1])) cmds.push_back(std::move(c));
    cmds.push_back(cmd_e(qs[k - 1], hats[k - 1]));
  }
  for (size_t k = qs.size() - 1; k >= 1; --k)
    cmds.push_back(cmd_m(hats[k - 1], Angle{}));
  cmds.push_back(cmd_m(qs[0], Angle{}));
  return cmds;
}

// prepare GHZ over outs[0..n-1]; hats[k-1] is the helper for outs[k]
std::vector<Command> ghz_cmds(const std::vector<QName>& outs,
                              const std::vector<QName>& hats) {
  std::vector<Command> cmds;
  for (size_t k = 1; k < outs.size(); ++k) {
    cmds.push_back(cmd_e(outs[k - 1], hats[k - 1]));
    for (Command& c : h_sub(hats[k - 1], outs[k])) cmds.push_back(std::move(c));
  }
  return cmds;
}

void require_size(int n, const char* what) {
  if (n < 1) fail(Errc::UsageError, std::string(what) + " needs n >= 1");
  if (n > 12) fail(Errc::UsageError, std::string(what) + " size is capped at 12");
}
}  // namespace

Pattern hadamard_pattern() {
  Pattern p;
  p.name = "H";
  p.space = {var("i"), var("o")};
  p.inputs = {var("i")};
  p.outputs = {var("o")};
  p.commands = h_sub(var("i"), var("o"));
  return p;
}

Pattern j_pattern_symbolic() {
  Pattern p;
  p.name = "J";
  p.space = {var("i"), var("o")};
  p.inputs = {var("i")};
  p.outputs = {var("o")};
  Angle a;
  a.param = "theta";
  p.commands = {cmd_e(var("i"), var("o")), cmd_m(var("i"), a),
                cmd_x(var("o"), s_of(var("i")))};
  p.params = {"theta"};
  return p;
}

Pattern j_pattern(double alpha) {
  // J(alpha) measures its input at -alpha
  Pattern p = instantiate_params(j_pattern_symbolic(),
                                 {{"theta", normalize_angle(-alpha)}});
  p.name = "J";
  return p;
}

Pattern cz_pattern() {
  Pattern p;
  p.name = "CZ";
  p.space = {var("a"), var("b")};
  p.inputs = p.space;
  p.outputs = p.space;
  p.commands = {cmd_e(var("a"), var("b"))};
  return p;
}

Pattern identity_pattern() {
  Pattern p;
  p.name = "I";
  p.space = {var("q")};
  p.inputs = p.space;
  p.outputs = p.space;
  return p;
}

Pattern ghz_pattern(int n) {
  require_size(n, "GHZ");
  Pattern p;
  p.name = "GHZ";
  std::vector<QName> outs, hats;
  for (int k = 1; k <= n; ++k) outs.push_back(var("q", k));
  for (int k = 2; k <= n; ++k) hats.push_back(var("h", k));
  p.space = outs;
  p.space.insert(p.space.end(), hats.begin(), hats.end());
  p.outputs = outs;
  p.commands = ghz_cmds(outs, hats);
  return p;
}

Pattern ghz_measurement_pattern(int n) {
  require_size(n, "MGHZ");
  Pattern p;
  p.name = "MGHZ";
  std::vector<QName> ins, hats;
  for (int k = 1; k <= n; ++k) ins.push_back(var("q", k));
  for (int k = 2; k <= n; ++k) hats.push_back(var("h", k));
  p.space = ins;
  p.space.insert(p.space.end(), hats.begin(), hats.end());
  p.inputs = ins;
  if (n == 1) {
    p.commands = {cmd_m(ins[0], Angle{})};
  } else {
    p.commands = mghz_cmds(ins, hats);
  }
  return p;
}

CompositionExpr cx_composition() {
  // three nodes wired target-line H, middle CZ, target-line H
  CompositionExpr c;
  Pattern h1 = hadamard_pattern();
  h1.space = {var("q1"), var("q2")};
  h1.inputs = {var("q1")};
  h1.outputs = {var("q2")};
  h1.commands = h_sub(var("q1"), var("q2"));
  Pattern cz = cz_pattern();
  cz.space = {var("q5"), var("q4")};
  cz.inputs = cz.space;
  cz.outputs = cz.space;
  cz.commands = {cmd_e(var("q5"), var("q4"))};
  Pattern h2 = hadamard_pattern();
  h2.space = {var("q6"), var("q7")};
  h2.inputs = {var("q6")};
  h2.outputs = {var("q7")};
  h2.commands = h_sub(var("q6"), var("q7"));
  c.nodes = {{"h1", h1}, {"cz", cz}, {"h2", h2}};
  c.pairs = {{"h1", var("q2"), "cz", var("q4")},
             {"cz", var("q4"), "h2", var("q6")}};
  return c;
}

CompositionExpr cx_composition_shortcut() {
  // (I (x) H) ; CZ ; (I (x) H), control line first
  CompositionExpr c;
  c.nodes = {{"ic", identity_pattern()},
             {"hin", hadamard_pattern()},
             {"cz", cz_pattern()},
             {"oc", identity_pattern()},
             {"hout", hadamard_pattern()}};
  c.pairs = {{"ic", var("q"), "cz", var("a")},
             {"hin", var("o"), "cz", var("b")},
             {"cz", var("a"), "oc", var("q")},
             {"cz", var("b"), "hout", var("i")}};
  return c;
}

Pattern cx_pattern() {
  Pattern p = compile_composition(cx_composition_shortcut());
  p.name = "CX";
  return p;
}

NetworkDef tp_network() {
  NetworkDef n;
  n.name = "TP";

  n.resource.name = "R";
  n.resource.space = {var("r2"), var("r3")};
  n.resource.outputs = n.resource.space;
  n.resource.commands = {cmd_e(var("r2"), var("r3"))};

  AgentPattern a;
  a.name = "A";
  a.qubit_sort = {var("q1"), var("q2")};
  a.channel_sort = {"?ch1", "?ch2"};
  a.commands = {cmd_e(var("q1"), var("q2")),
                cmd_m(var("q1"), Angle{}),
                cmd_m(var("q2"), Angle{}),
                cmd_send("?ch1", s_of(var("q1"))),
                cmd_send("?ch2", s_of(var("q2")))};

  AgentPattern b;
  b.name = "B";
  b.qubit_sort = {var("q3")};
  b.channel_sort = {"?ch1", "?ch2"};
  b.commands = {cmd_recv("?ch1", "v1"), cmd_z(var("q3"), SignalExpr::input_ref("v1")),
                cmd_recv("?ch2", "v2"), cmd_x(var("q3"), SignalExpr::input_ref("v2"))};

  n.agents = {a, b};
  n.qubit_pairs = {{var("r2"), "A", var("q2")}, {var("r3"), "B", var("q3")}};
  n.channel_pairs = {{"A", "?ch1", "B", "?ch1"}, {"A", "?ch2", "B", "?ch2"}};
  return n;
}

namespace {
// common ES pieces; `merged` folds agent 0 into the leader
NetworkDef es_common(int n, bool merged) {
  NetworkDef net;
  net.name = merged ? "ES*" : "ES";

  // resource: one entangled pair per party
  Pattern& r = net.resource;
  r.name = "R";
  for (int k = 0; k <= n; ++k) {
    r.space.push_back(var("p", k));
    r.space.push_back(var("pb", k));
    r.commands.push_back(cmd_e(var("p", k), var("pb", k)));
  }
  r.outputs = r.space;

  AgentPattern leader;
  leader.name = "L";
  std::vector<QName> bars, hats;
  for (int k = 0; k <= n; ++k) bars.push_back(var("b", k));
  for (int k = 1; k <= n; ++k) hats.push_back(var("h", k));
  if (merged) leader.qubit_sort.push_back(var("q0"));
  leader.qubit_sort.insert(leader.qubit_sort.end(), bars.begin(), bars.end());
  leader.qubit_sort.insert(leader.qubit_sort.end(), hats.begin(), hats.end());
  leader.commands = mghz_cmds(bars, hats);
  if (merged) {
    leader.commands.push_back(cmd_x(var("q0"), s_of(var("b", 0))));
  } else {
    leader.channel_sort.push_back("?c0");
    leader.commands.push_back(cmd_send("?c0", s_of(var("b", 0))));
  }
  for (int k = 1; k <= n; ++k) {
    leader.channel_sort.push_back("?c" + std::to_string(k));
    std::vector<SignalExpr> terms;
    for (int j = 1; j <= k; ++j) terms.push_back(s_of(var("h", j)));
    SignalExpr sig = terms.size() == 1 ? terms[0] : SignalExpr::sum(terms);
    leader.commands.push_back(cmd_send("?c" + std::to_string(k), sig));
  }
  net.agents.push_back(leader);

  for (int k = merged ? 1 : 0; k <= n; ++k) {
    AgentPattern a;
    a.name = "A" + std::to_string(k);
    a.qubit_sort = {var("q")};
    a.channel_sort = {"?c"};
    a.commands.push_back(cmd_recv("?c", "v"));
    if (k == 0)
      a.commands.push_back(cmd_x(var("q"), SignalExpr::input_ref("v")));
    else
      a.commands.push_back(cmd_z(var("q"), SignalExpr::input_ref("v")));
    net.agents.push_back(a);
  }

  for (int k = 0; k <= n; ++k) {
    // barred half to the leader; working half to its party
    net.qubit_pairs.push_back({var("pb", k), "L", var("b", k)});
    if (merged && k == 0)
      net.qubit_pairs.push_back({var("p", 0), "L", var("q0")});
    else
      net.qubit_pairs.push_back({var("p", k), "A" + std::to_string(k), var("q")});
  }
  for (int k = merged ? 1 : 0; k <= n; ++k)
    net.channel_pairs.push_back(
        {"L", "?c" + std::to_string(k), "A" + std::to_string(k), "?c"});
  return net;
}

// sharing stage: leader folds the secret into the entangled bundle, every
// other party turns its leg over by a teleported Hadamard
NetworkDef sc_stage(int n, bool with_resource) {
  NetworkDef net;
  net.name = "SC";
  net.resource.name = "R";

  AgentPattern leader;
  leader.name = "L";
  leader.qubit_sort = {var("q0"), var("c")};
  leader.commands = {cmd_e(var("q0"), var("c")), cmd_m(var("q0"), Angle{})};
  for (int k = 1; k <= n; ++k) {
    leader.channel_sort.push_back("?d" + std::to_string(k));
    leader.commands.push_back(
        cmd_send("?d" + std::to_string(k), s_of(var("q0"))));
  }
  net.agents.push_back(leader);

  for (int k = 1; k <= n; ++k) {
    AgentPattern a;
    a.name = "A" + std::to_string(k);
    a.qubit_sort = {var("q"), var("o")};
    a.channel_sort = {"?d"};
    a.commands = h_sub(var("q"), var("o"));
    a.commands.push_back(cmd_recv("?d", "x"));
    a.commands.push_back(cmd_x(var("o"), SignalExpr::input_ref("x")));
    net.agents.push_back(a);
    net.channel_pairs.push_back({"L", "?d" + std::to_string(k),
                                 "A" + std::to_string(k), "?d"});
  }

  if (with_resource) {
    // placeholder bundle: every leg |+>, meant to be replaced by a handover
    for (int k = 0; k <= n; ++k) net.resource.space.push_back(var("r", k));
    net.resource.outputs = net.resource.space;
    net.qubit_pairs.push_back({var("r", 0), "L", var("q0")});
    for (int k = 1; k <= n; ++k)
      net.qubit_pairs.push_back({var("r", k), "A" + std::to_string(k), var("q")});
  }
  return net;
}
}  // namespace

NetworkDef es_network(int n) {
  require_size(n, "ES");
  return es_common(n, false);
}

NetworkDef es_network_merged(int n) {
  require_size(n, "ES");
  return es_common(n, true);
}

NetworkDef sc_stage_network(int n) {
  require_size(n, "SC");
  return sc_stage(n, true);
}

NetworkDef sc_network(int n) {
  require_size(n, "SC");
  NetworkDef net = sc_stage(n, false);

  // resource: GHZ over n+1 lines, every line turned over by a Hadamard
  CompositionExpr c;
  c.nodes.push_back({"g", ghz_pattern(n + 1)});
  for (int k = 0; k <= n; ++k) {
    Pattern h = hadamard_pattern();
    c.nodes.push_back({"h" + std::to_string(k), h});
    c.pairs.push_back(
        {"g", var("q", k + 1), "h" + std::to_string(k), var("i")});
  }
  Pattern res = compile_composition(c);
  res.name = "R";
  net.resource = res;

  net.qubit_pairs.push_back({res.outputs[0], "L", var("q0")});
  for (int k = 1; k <= n; ++k)
    net.qubit_pairs.push_back(
        {res.outputs[k], "A" + std::to_string(k), var("q")});
  return net;
}

NetworkDef sc_es_network(int n) {
  require_size(n, "SC-ES");
  NetworkDef es = es_network_merged(n);
  NetworkDef sc = sc_stage(n, false);
  std::vector<std::pair<std::string, std::string>> agents{{"L", "L"}};
  std::vector<NetworkQubitPair> qubits{{"L", var("q0"), "L", var("q0")}};
  for (int k = 1; k <= n; ++k) {
    std::string a = "A" + std::to_string(k);
    agents.push_back({a, a});
    qubits.push_back({a, var("q"), a, var("q")});
  }
  NetworkDef out = compose_networks(es, sc, agents, qubits);
  out.name = "SC-ES";
  return out;
}

GhzDecoding decode_ghz_measurement(const AssembledPattern& mghz,
                                   const std::map<std::int64_t, int>& outcomes) {
  auto out_of = [&](const std::string& name) {
    auto nit = mghz.naming.find(name);
    if (nit == mghz.naming.end())
      fail(Errc::UnboundOutcome, "pattern has no qubit named " + name);
    auto oit = outcomes.find(nit->second);
    if (oit == outcomes.end())
      fail(Errc::UnboundOutcome, "no outcome recorded for " + name);
    return oit->second;
  };
  int n = 0;
  while (mghz.naming.count("?q" + std::to_string(n + 1))) ++n;
  GhzDecoding d;
  d.projection.assign(n, 0);
  int acc = 0;
  for (int k = 2; k <= n; ++k) {
    acc ^= out_of("?h" + std::to_string(k));
    d.projection[k - 1] = acc;
  }
  d.sign = out_of("?q1");
  return d;
}

const std::vector<BuiltinInfo>& builtin_list() {
  static const std::vector<BuiltinInfo> table = {
      {"H", false, "", "", "Hadamard on one qubit"},
      {"J", false, "alpha", "0", "J(alpha) = H followed by a Z-rotation"},
      {"CZ", false, "", "", "controlled-Z on two qubits"},
      {"CX", false, "", "", "controlled-NOT compiled from H and CZ"},
      {"GHZ", false, "n", "3", "prepare an n-qubit GHZ state"},
      {"MGHZ", false, "n", "3", "measure n qubits in the GHZ basis"},
      {"TP", true, "", "", "teleport one qubit between two agents"},
      {"ES", true, "n", "2", "entanglement swapping: share GHZ among n+1 parties"},
      {"SC", true, "n", "2", "share an input state among n+1 parties"},
      {"SC-ES", true, "n", "2", "sharing stage composed onto entanglement swapping"},
  };
  return table;
}

bool is_builtin_name(const std::string& name) {
  for (const BuiltinInfo& b : builtin_list())
    if (b.name == name) return true;
  return false;
}

BuiltinTarget make_builtin(const std::string& name,
                           const std::optional<std::string>& arg) {
  auto as_int = [&](int dflt) {
    if (!arg) return dflt;
    try {
      size_t pos = 0;
      int v = std::stoi(*arg, &pos);
      if (pos != arg->size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail(Errc::UsageError, name + " takes an integer size, got " + *arg);
    }
  };
  auto as_angle = [&]() -> double {
    if (!arg) return 0.0;
    Angle a = parse_angle(SExpr::make_atom(*arg), {});
    return a.value;
  };

  BuiltinTarget t;
  if (name == "H") {
    if (arg) fail(Errc::UsageError, "H takes no argument");
    t.pattern = hadamard_pattern();
  } else if (name == "J") {
    t.pattern = j_pattern(as_angle());
  } else if (name == "CZ") {
    if (arg) fail(Errc::UsageError, "CZ takes no argument");
    t.pattern = cz_pattern();
  } else if (name == "CX") {
    if (arg) fail(Errc::UsageError, "CX takes no argument");
    t.pattern = cx_pattern();
  } else if (name == "GHZ") {
    t.pattern = ghz_pattern(as_int(3));
  } else if (name == "MGHZ") {
    t.pattern = ghz_measurement_pattern(as_int(3));
  } else if (name == "TP") {
    if (arg) fail(Errc::UsageError, "TP takes no argument");
    t.network = tp_network();
  } else if (name == "ES") {
    t.network = es_network(as_int(2));
  } else if (name == "SC") {
    t.network = sc_network(as_int(2));
  } else if (name == "SC-ES") {
    t.network = sc_es_network(as_int(2));
  } else {
    fail(Errc::UsageError, "unknown builtin " + name);
  }
  return t;
}

}  // namespace dmc
