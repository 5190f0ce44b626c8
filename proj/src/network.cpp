#include "dmc/network.hpp"

#include "dmc/compose.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "dmc/error.hpp"

namespace dmc {

namespace {
bool contains(const std::vector<QName>& xs, const QName& q) {
  return std::find(xs.begin(), xs.end(), q) != xs.end();
}
bool contains_str(const std::vector<std::string>& xs, const std::string& s) {
  return std::find(xs.begin(), xs.end(), s) != xs.end();
}

void signal_qubits(const SignalExpr& s, std::vector<QName>& out) {
  if (s.kind == SignalExpr::Kind::Outcome) out.push_back(s.qubit);
  if (s.kind == SignalExpr::Kind::Sum)
    for (const SignalExpr& t : s.terms) signal_qubits(t, out);
}
void signal_inputs(const SignalExpr& s, std::vector<std::string>& out) {
  if (s.kind == SignalExpr::Kind::Input) out.push_back(s.input);
  if (s.kind == SignalExpr::Kind::Sum)
    for (const SignalExpr& t : s.terms) signal_inputs(t, out);
}

const AgentPattern* find_agent(const NetworkDef& n, const std::string& name) {
  for (const AgentPattern& a : n.agents)
    if (a.name == name) return &a;
  return nullptr;
}
}  // namespace

std::vector<std::string> validate_network(const NetworkDef& n) {
  std::vector<std::string> out;

  if (!n.resource.inputs.empty())
    out.push_back("resource pattern must have no inputs");
  if (n.resource.distributed())
    out.push_back("resource pattern must be local (no communication)");
  for (const std::string& v : validate_pattern(n.resource))
    out.push_back("resource: " + v);

  std::set<std::string> agent_names;
  for (const AgentPattern& a : n.agents) {
    if (a.name.empty()) out.push_back("an agent has an empty name");
    if (!agent_names.insert(a.name).second)
      out.push_back("duplicate agent name " + a.name);

    std::string who = "agent " + a.name;
    std::set<QName> sort_set;
    for (const QName& q : a.qubit_sort) {
      if (is_concrete(q))
        out.push_back(who + ": qubit sort must use variables, got " +
                      qname_str(q));
      if (!sort_set.insert(q).second)
        out.push_back(who + ": duplicate sort qubit " + qname_str(q));
    }
    std::set<std::string> ch_set;
    for (const std::string& ch : a.channel_sort)
      if (!ch_set.insert(ch).second)
        out.push_back(who + ": duplicate channel " + ch);
    std::set<std::string> cin_set;
    for (const std::string& ci : a.classical_inputs)
      if (!cin_set.insert(ci).second)
        out.push_back(who + ": duplicate classical input " + ci);

    std::set<QName> measured;
    std::set<std::string> bound(a.classical_inputs.begin(),
                                a.classical_inputs.end());
    for (size_t i = 0; i < a.commands.size(); ++i) {
      const Command& c = a.commands[i];
      std::string what =
          who + " command " + std::to_string(i + 1) + " " +
          print_sexpr(command_to_sexpr(c));
      auto check_q = [&](const QName& q) {
        if (!sort_set.count(q))
          out.push_back(what + " touches " + qname_str(q) +
                        ", which is outside the agent's qubit sort");
        if (measured.count(q))
          out.push_back(what + " touches " + qname_str(q) +
                        " after its measurement");
      };
      auto check_ch = [&](const std::string& ch) {
        if (!ch_set.count(ch))
          out.push_back(what + " uses channel " + ch +
                        ", which is outside the agent's channel sort");
      };
      auto check_sig = [&](const SignalExpr& s) {
        std::vector<QName> qs;
        signal_qubits(s, qs);
        for (const QName& q : qs) {
          if (!sort_set.count(q))
            out.push_back(what + " reads an outcome of " + qname_str(q) +
                          ", which is outside the agent's qubit sort");
          else if (!measured.count(q))
            out.push_back(what + " reads the outcome of " + qname_str(q) +
                          " before the agent measures it");
        }
        std::vector<std::string> ins;
        signal_inputs(s, ins);
        for (const std::string& x : ins)
          if (!bound.count(x))
            out.push_back(what + " reads classical name " + x +
                          " before it is declared or received");
      };
      switch (c.op) {
        case Command::Op::Entangle:
          if (c.q1 == c.q2) out.push_back(what + " entangles a qubit with itself");
          check_q(c.q1);
          check_q(c.q2);
          break;
        case Command::Op::Measure:
          check_q(c.q1);
          if (c.sig1) check_sig(*c.sig1);
          if (c.sig2) check_sig(*c.sig2);
          if (c.angle.symbolic())
            out.push_back(what + " has an uninstantiated angle parameter");
          measured.insert(c.q1);
          break;
        case Command::Op::CorrectX:
        case Command::Op::CorrectZ:
          check_q(c.q1);
          if (c.sig1) check_sig(*c.sig1);
          break;
        case Command::Op::Send:
          check_ch(c.channel);
          if (c.sig1) check_sig(*c.sig1);
          break;
        case Command::Op::Recv:
          check_ch(c.channel);
          bound.insert(c.binding);
          break;
        case Command::Op::QSend:
          check_ch(c.channel);
          check_q(c.q1);
          break;
        case Command::Op::QRecv:
          check_ch(c.channel);
          if (!sort_set.count(c.q1))
            out.push_back(what + " binds " + qname_str(c.q1) +
                          ", which is outside the agent's qubit sort");
          break;
      }
    }
  }

  // config: qubit claims
  std::set<QName> claimed_resource;
  std::set<std::pair<std::string, QName>> claimed_agent;
  for (const QubitPairCfg& qp : n.qubit_pairs) {
    if (!contains(n.resource.outputs, qp.resource_qubit))
      out.push_back("qubit pair claims " + qname_str(qp.resource_qubit) +
                    ", which is not a resource output");
    const AgentPattern* a = find_agent(n, qp.agent);
    if (!a) {
      out.push_back("qubit pair names unknown agent " + qp.agent);
      continue;
    }
    if (!contains(a->qubit_sort, qp.agent_qubit))
      out.push_back("qubit pair targets " + qp.agent + "." +
                    qname_str(qp.agent_qubit) + ", which is not in its sort");
    if (!claimed_resource.insert(qp.resource_qubit).second)
      out.push_back("resource qubit " + qname_str(qp.resource_qubit) +
                    " is claimed twice");
    if (!claimed_agent.insert({qp.agent, qp.agent_qubit}).second)
      out.push_back("agent qubit " + qp.agent + "." +
                    qname_str(qp.agent_qubit) + " receives two resource qubits");
  }
  for (const QName& q : n.resource.outputs)
    if (!claimed_resource.count(q))
      out.push_back("resource output " + qname_str(q) +
                    " is claimed by no agent");

  // config: channel pairing
  std::set<std::pair<std::string, std::string>> paired;
  for (const ChannelPairCfg& cp : n.channel_pairs) {
    const AgentPattern* a1 = find_agent(n, cp.agent1);
    const AgentPattern* a2 = find_agent(n, cp.agent2);
    if (!a1 || !a2) {
      out.push_back("channel pair names an unknown agent");
      continue;
    }
    if (cp.agent1 == cp.agent2)
      out.push_back("channel pair links agent " + cp.agent1 + " to itself");
    if (!contains_str(a1->channel_sort, cp.ch1))
      out.push_back("channel pair endpoint " + cp.agent1 + "." + cp.ch1 +
                    " is not in its channel sort");
    if (!contains_str(a2->channel_sort, cp.ch2))
      out.push_back("channel pair endpoint " + cp.agent2 + "." + cp.ch2 +
                    " is not in its channel sort");
    if (!paired.insert({cp.agent1, cp.ch1}).second)
      out.push_back("channel endpoint " + cp.agent1 + "." + cp.ch1 +
                    " appears in two pairs");
    if (!paired.insert({cp.agent2, cp.ch2}).second)
      out.push_back("channel endpoint " + cp.agent2 + "." + cp.ch2 +
                    " appears in two pairs");
  }
  for (const AgentPattern& a : n.agents) {
    for (const std::string& ch : a.channel_sort) {
      if (paired.count({a.name, ch})) continue;
      bool used = false;
      for (const Command& c : a.commands)
        if (c.communication() && c.channel == ch) used = true;
      if (!used)
        out.push_back("channel " + a.name + "." + ch +
                      " is neither paired nor used");
    }
  }
  return out;
}

CompiledNetwork compile_network(const NetworkDef& n) {
  std::vector<std::string> violations = validate_network(n);
  if (!violations.empty()) {
    // surface the dedicated categories for the classic config mistakes
    for (const std::string& v : violations) {
      if (v.find("claimed by no agent") != std::string::npos)
        fail(Errc::UnclaimedResourceQubit, v);
      if (v.find("neither paired nor used") != std::string::npos)
        fail(Errc::DanglingChannel, v);
      if (v.find("claimed twice") != std::string::npos ||
          v.find("receives two resource qubits") != std::string::npos ||
          v.find("appears in two pairs") != std::string::npos)
        fail(Errc::BindingConflict, v);
    }
    std::string msg = "network is invalid:";
    for (const std::string& v : violations) msg += "\n  " + v;
    fail(Errc::ValidationFailed, msg);
  }

  CompiledNetwork out;
  out.name = n.name;
  FreshAlloc alloc;
  out.resource = assemble(n.resource, alloc);

  // resource-output reference per (agent, sort name)
  std::map<std::pair<std::string, std::string>, std::int64_t> claims;
  for (const QubitPairCfg& qp : n.qubit_pairs) {
    std::int64_t ref = -1;
    for (size_t i = 0; i < n.resource.outputs.size(); ++i)
      if (n.resource.outputs[i] == qp.resource_qubit)
        ref = out.resource.outputs[i];
    claims[{qp.agent, qname_str(qp.agent_qubit)}] = ref;
  }

  // global channel ids: pairs in declaration order, then self-channels
  std::map<std::pair<std::string, std::string>, std::string> channel_id;
  int next_ch = 0;
  for (const ChannelPairCfg& cp : n.channel_pairs) {
    std::string id = "c" + std::to_string(next_ch++);
    channel_id[{cp.agent1, cp.ch1}] = id;
    channel_id[{cp.agent2, cp.ch2}] = id;
    out.channels.push_back(id);
  }
  for (const AgentPattern& a : n.agents)
    for (const std::string& ch : a.channel_sort)
      if (!channel_id.count({a.name, ch})) {
        std::string id = "c" + std::to_string(next_ch++);
        channel_id[{a.name, ch}] = id;
        out.channels.push_back(id);
      }

  for (const AgentPattern& a : n.agents) {
    CompiledAgent ca;
    ca.name = a.name;
    for (const QName& q : a.qubit_sort) {
      std::string key = qname_str(q);
      auto it = claims.find({a.name, key});
      std::int64_t ref = it != claims.end() ? it->second : alloc.alloc();
      ca.qubit_names[key] = ref;
      ca.qubits.push_back(ref);
      out.initial_owner[ref] = a.name;
    }
    for (const std::string& ch : a.channel_sort)
      ca.channel_names[ch] = channel_id.at({a.name, ch});

    auto qualify = [&a](const std::string& name) { return a.name + "." + name; };
    std::function<void(SignalExpr&)> fix_sig = [&](SignalExpr& s) {
      if (s.kind == SignalExpr::Kind::Outcome)
        s.qubit = QName{ca.qubit_names.at(qname_str(s.qubit))};
      if (s.kind == SignalExpr::Kind::Input) s.input = qualify(s.input);
      if (s.kind == SignalExpr::Kind::Sum)
        for (SignalExpr& t : s.terms) fix_sig(t);
    };
    for (Command c : a.commands) {
      if (c.op == Command::Op::Entangle || c.op == Command::Op::Measure ||
          c.op == Command::Op::CorrectX || c.op == Command::Op::CorrectZ ||
          c.op == Command::Op::QSend || c.op == Command::Op::QRecv) {
        c.q1 = QName{ca.qubit_names.at(qname_str(c.q1))};
        if (c.op == Command::Op::Entangle)
          c.q2 = QName{ca.qubit_names.at(qname_str(c.q2))};
      }
      if (c.communication()) c.channel = ca.channel_names.at(c.channel);
      if (c.op == Command::Op::Recv) c.binding = qualify(c.binding);
      if (c.sig1) fix_sig(*c.sig1);
      if (c.sig2) fix_sig(*c.sig2);
      ca.commands.push_back(std::move(c));
    }
    out.agents.push_back(std::move(ca));
  }
  return out;
}

namespace {

struct SchedState {
  Environment env;
  std::vector<size_t> pc;
  std::map<std::string, ChannelValue> chan;  // present key = full slot
  std::map<std::int64_t, std::int64_t> alias;
  std::map<std::int64_t, std::string> owner;
};

struct NetRunner {
  const CompiledNetwork& net;
  const NetworkRunOptions& opts;
  std::vector<int> order;
  NetworkRunResult out;

  std::int64_t resolve(const SchedState& st, std::int64_t r) const {
    int guard = 0;
    while (true) {
      auto it = st.alias.find(r);
      if (it == st.alias.end()) return r;
      r = it->second;
      if (++guard > 1024) fail(Errc::OwnershipViolation, "alias cycle");
    }
  }

  SignalExpr resolve_signal(const SchedState& st, const SignalExpr& s) const {
    SignalExpr r = s;
    if (r.kind == SignalExpr::Kind::Outcome)
      r.qubit = QName{resolve(st, qref(r.qubit))};
    if (r.kind == SignalExpr::Kind::Sum) {
      r.terms.clear();
      for (const SignalExpr& t : s.terms) r.terms.push_back(resolve_signal(st, t));
    }
    return r;
  }

  std::int64_t owned_ref(SchedState& st, const std::string& agent,
                         const QName& q) const {
    std::int64_t r = resolve(st, qref(q));
    auto it = st.owner.find(r);
    if (it == st.owner.end() || it->second != agent)
      fail(Errc::OwnershipViolation,
           "agent " + agent + " does not own qubit " + std::to_string(r));
    return r;
  }

  // receiver agent index sharing a channel with `agent`, -1 when none
  int peer_at_recv(const SchedState& st, int agent_idx,
                   const std::string& ch_id, bool quantum) const {
    for (size_t i = 0; i < net.agents.size(); ++i) {
      if (static_cast<int>(i) == agent_idx) continue;
      const CompiledAgent& a = net.agents[i];
      if (st.pc[i] >= a.commands.size()) continue;
      const Command& c = a.commands[st.pc[i]];
      bool want = quantum ? c.op == Command::Op::QRecv : c.op == Command::Op::Recv;
      if (want && c.channel == ch_id) return static_cast<int>(i);
    }
    return -1;
  }

  void deliver_bit(SchedState& st, int receiver_idx, int bit) {
    const CompiledAgent& a = net.agents[receiver_idx];
    const Command& c = a.commands[st.pc[receiver_idx]];
    st.env.c.inputs[c.binding] = bit;
    ++st.pc[receiver_idx];
  }

  void deliver_qubit(SchedState& st, int receiver_idx, std::int64_t ref) {
    const CompiledAgent& a = net.agents[receiver_idx];
    const Command& c = a.commands[st.pc[receiver_idx]];
    st.alias[qref(c.q1)] = ref;
    st.owner[ref] = a.name;
    ++st.pc[receiver_idx];
  }

  // true if the communication command executed
  bool try_comm(SchedState& st, int agent_idx, const Command& c) {
    const std::string& agent = net.agents[agent_idx].name;
    switch (c.op) {
      case Command::Op::Send: {
        if (opts.rendezvous) {
          int peer = peer_at_recv(st, agent_idx, c.channel, false);
          if (peer < 0) return false;
          deliver_bit(st, peer, eval_signal(resolve_signal(st, *c.sig1), st.env.c));
          return true;
        }
        if (st.chan.count(c.channel)) return false;
        ChannelValue v;
        v.kind = ChannelValue::Kind::Bit;
        v.bit = eval_signal(resolve_signal(st, *c.sig1), st.env.c);
        st.chan[c.channel] = v;
        return true;
      }
      case Command::Op::Recv: {
        if (opts.rendezvous) return false;  // completed by the sender's step
        auto it = st.chan.find(c.channel);
        if (it == st.chan.end()) return false;
        if (it->second.kind != ChannelValue::Kind::Bit)
          fail(Errc::ChannelTypeMismatch,
               "recv on " + c.channel + " found a qubit");
        st.env.c.inputs[c.binding] = it->second.bit;
        st.chan.erase(it);
        return true;
      }
      case Command::Op::QSend: {
        std::int64_t r = owned_ref(st, agent, c.q1);
        if (!st.env.q.has_qubit(r))
          fail(Errc::UnknownQubit,
               "agent " + agent + " sends dead qubit " + std::to_string(r));
        if (opts.rendezvous) {
          int peer = peer_at_recv(st, agent_idx, c.channel, true);
          if (peer < 0) return false;
          st.owner.erase(r);
          deliver_qubit(st, peer, r);
          return true;
        }
        if (st.chan.count(c.channel)) return false;
        st.owner.erase(r);
        ChannelValue v;
        v.kind = ChannelValue::Kind::Qubit;
        v.qubit = r;
        st.chan[c.channel] = v;
        return true;
      }
      case Command::Op::QRecv: {
        if (opts.rendezvous) return false;
        auto it = st.chan.find(c.channel);
        if (it == st.chan.end()) return false;
        if (it->second.kind != ChannelValue::Kind::Qubit)
          fail(Errc::ChannelTypeMismatch,
               "qrecv on " + c.channel + " found a classical bit");
        std::int64_t ref = it->second.qubit;
        st.chan.erase(it);
        st.alias[qref(c.q1)] = ref;
        st.owner[ref] = agent;
        return true;
      }
      default:
        return false;
    }
  }

  double exec_local(SchedState& st, const std::string& agent, const Command& c,
                    std::optional<int> forced = std::nullopt) {
    Command r = c;  // resolve aliases, then reuse the local executor
    r.q1 = QName{owned_ref(st, agent, c.q1)};
    if (c.op == Command::Op::Entangle) r.q2 = QName{owned_ref(st, agent, c.q2)};
    if (c.sig1) r.sig1 = resolve_signal(st, *c.sig1);
    if (c.sig2) r.sig2 = resolve_signal(st, *c.sig2);
    double p = exec_quantum(st.env, r, forced);
    if (c.op == Command::Op::Measure) st.owner.erase(qref(r.q1));
    return p;
  }

  [[noreturn]] void report_deadlock(const SchedState& st) const {
    std::string msg = "no agent can make progress;";
    for (size_t i = 0; i < net.agents.size(); ++i) {
      const CompiledAgent& a = net.agents[i];
      if (st.pc[i] >= a.commands.size()) continue;
      msg += " agent " + a.name + " waits at " +
             print_sexpr(command_to_sexpr(a.commands[st.pc[i]])) + ";";
    }
    fail(Errc::Deadlock, msg);
  }

  void explore(SchedState st, size_t oi, int blocked_streak, double acc) {
    size_t n = net.agents.size();
    while (true) {
      bool all_done = true;
      for (size_t i = 0; i < n; ++i)
        if (st.pc[i] < net.agents[i].commands.size()) all_done = false;
      if (all_done) {
        NetBranch b;
        b.outcomes = st.env.c.outcomes;
        b.probability = acc;
        for (std::int64_t q : st.env.q.live_qubits()) {
          auto it = st.owner.find(q);
          b.owner[q] = it == st.owner.end() ? std::string("-") : it->second;
        }
        b.env = std::move(st.env);
        out.branches.push_back(std::move(b));
        return;
      }
      if (blocked_streak >= static_cast<int>(n)) report_deadlock(st);

      int ai = order[oi % n];
      const CompiledAgent& a = net.agents[ai];
      bool progressed = false;
      while (st.pc[ai] < a.commands.size()) {
        const Command& c = a.commands[st.pc[ai]];
        if (c.op == Command::Op::Measure) {
          ++st.pc[ai];
          for (int bit = 0; bit < 2; ++bit) {
            SchedState child = st;
            double p = exec_local(child, a.name, c, bit);
            double nacc = acc * p;
            if (nacc < opts.run.prune_threshold) {
              ++out.pruned;
              continue;
            }
            explore(std::move(child), oi, 0, nacc);
          }
          return;
        }
        if (c.quantum()) {
          exec_local(st, a.name, c);
          ++st.pc[ai];
          progressed = true;
          continue;
        }
        if (!try_comm(st, ai, c)) break;
        ++st.pc[ai];
        progressed = true;
      }
      ++oi;
      blocked_streak = progressed ? 0 : blocked_streak + 1;
    }
  }

  void sample(SchedState st, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    size_t n = net.agents.size();
    size_t oi = 0;
    int blocked_streak = 0;
    double acc = 1.0;
    while (true) {
      bool all_done = true;
      for (size_t i = 0; i < n; ++i)
        if (st.pc[i] < net.agents[i].commands.size()) all_done = false;
      if (all_done) break;
      if (blocked_streak >= static_cast<int>(n)) report_deadlock(st);

      int ai = order[oi % n];
      const CompiledAgent& a = net.agents[ai];
      bool progressed = false;
      while (st.pc[ai] < a.commands.size()) {
        const Command& c = a.commands[st.pc[ai]];
        if (c.op == Command::Op::Measure) {
          SchedState zero = st;
          double p0 = exec_local(zero, a.name, c, 0);
          if (uniform() < p0) {
            st = std::move(zero);
            acc *= p0;
          } else {
            acc *= exec_local(st, a.name, c, 1);
          }
          ++st.pc[ai];
          progressed = true;
          continue;
        }
        if (c.quantum()) {
          exec_local(st, a.name, c);
          ++st.pc[ai];
          progressed = true;
          continue;
        }
        if (!try_comm(st, ai, c)) break;
        ++st.pc[ai];
        progressed = true;
      }
      ++oi;
      blocked_streak = progressed ? 0 : blocked_streak + 1;
    }
    NetBranch b;
    b.outcomes = st.env.c.outcomes;
    b.probability = acc;
    for (std::int64_t q : st.env.q.live_qubits()) {
      auto it = st.owner.find(q);
      b.owner[q] = it == st.owner.end() ? std::string("-") : it->second;
    }
    b.env = std::move(st.env);
    out.branches.push_back(std::move(b));
  }
};

// run the resource pattern on its own; it must land on one state
QuantumState run_resource(const AssembledPattern& res, const RunOptions& base,
                          double tol) {
  RunOptions opts = base;
  opts.mode = RunMode::Enumerate;
  RunResult rr = run_pattern(res, {}, {}, opts);
  if (rr.branches.empty())
    fail(Errc::ZeroProbabilityBranch, "resource pattern produced no branches");

  std::vector<std::int64_t> outs(res.outputs);
  std::sort(outs.begin(), outs.end());
  const QuantumState& first = rr.branches[0].env.q;
  if (first.live_qubits() != outs)
    fail(Errc::ValidationFailed,
         "resource run left qubits other than its outputs");
  std::vector<cplx> v0 = dense_vector(first, outs);
  for (size_t i = 1; i < rr.branches.size(); ++i) {
    const QuantumState& qi = rr.branches[i].env.q;
    if (qi.live_qubits() != outs ||
        !same_up_to_phase(dense_vector(qi, outs), v0, tol))
      fail(Errc::NondeterministicResource,
           "resource pattern branches disagree beyond tolerance");
  }
  return first;
}
}  // namespace

NetworkRunResult run_network(const CompiledNetwork& net, const InputMap& inputs,
                             const std::map<std::string, int>& classical_inputs,
                             const NetworkRunOptions& opts,
                             const QuantumState* resource_state) {
  SchedState st;
  if (resource_state) {
    std::vector<std::int64_t> outs(net.resource.outputs);
    std::sort(outs.begin(), outs.end());
    if (resource_state->live_qubits() != outs)
      fail(Errc::OrderMismatch,
           "provided resource state does not cover exactly the resource outputs");
    st.env.q = *resource_state;
  } else {
    st.env.q = run_resource(net.resource, opts.run, opts.tol);
  }
  st.owner = net.initial_owner;
  st.env.c.inputs = classical_inputs;

  // user-fed input qubits
  std::map<std::int64_t, std::string> holder;  // sort ref -> agent
  for (const CompiledAgent& a : net.agents)
    for (std::int64_t q : a.qubits) holder[q] = a.name;
  for (const auto& [q, amps] : inputs) {
    if (!holder.count(q))
      fail(Errc::UnknownQubit,
           "input qubit " + std::to_string(q) + " is not held by any agent");
    st.env.q.add_qubit(q, normalized_input(amps));
  }

  // auxiliaries: unclaimed, unfed sort qubits whose first touch is E
  for (const CompiledAgent& a : net.agents) {
    std::set<std::int64_t> skip;  // qrecv slots
    std::map<std::int64_t, bool> first_is_e;
    for (const Command& c : a.commands) {
      auto note = [&](std::int64_t r, bool is_e) {
        if (!first_is_e.count(r) && !skip.count(r)) first_is_e[r] = is_e;
      };
      switch (c.op) {
        case Command::Op::Entangle:
          note(qref(c.q1), true);
          note(qref(c.q2), true);
          break;
        case Command::Op::Measure:
        case Command::Op::CorrectX:
        case Command::Op::CorrectZ:
        case Command::Op::QSend:
          note(qref(c.q1), false);
          break;
        case Command::Op::QRecv:
          if (!first_is_e.count(qref(c.q1))) skip.insert(qref(c.q1));
          break;
        default:
          break;
      }
    }
    for (const auto& [r, is_e] : first_is_e) {
      if (st.env.q.has_qubit(r)) continue;  // claimed or user-fed
      if (is_e)
        st.env.q.add_plus(r);
      // otherwise leave dead: reaching it raises UnknownQubit
    }
  }

  NetRunner runner{net, opts, {}, {}};
  size_t n = net.agents.size();
  if (opts.agent_order.empty()) {
    for (size_t i = 0; i < n; ++i) runner.order.push_back(static_cast<int>(i));
  } else {
    if (opts.agent_order.size() != n)
      fail(Errc::LengthMismatch, "agent order permutation has the wrong size");
    runner.order = opts.agent_order;
  }
  st.pc.assign(n, 0);

  if (opts.run.mode == RunMode::Enumerate)
    runner.explore(std::move(st), 0, 0, 1.0);
  else
    runner.sample(std::move(st), opts.run.seed);
  return std::move(runner.out);
}

namespace {
// pick NAME, NAME~2, NAME~3, ... not already in `taken`
std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int k = 2;; ++k) {
    std::string cand = base + "~" + std::to_string(k);
    if (!taken.count(cand)) return cand;
  }
}

struct AgentRename {
  std::map<std::string, QName> qubit;
  std::map<std::string, std::string> channel;
  std::map<std::string, std::string> classical;

  QName q(const QName& old) const {
    auto it = qubit.find(qname_str(old));
    return it == qubit.end() ? old : it->second;
  }
  std::string ch(const std::string& old) const {
    auto it = channel.find(old);
    return it == channel.end() ? old : it->second;
  }
  std::string ci(const std::string& old) const {
    auto it = classical.find(old);
    return it == classical.end() ? old : it->second;
  }
};

std::vector<std::string> classical_names_of(const AgentPattern& a) {
  std::vector<std::string> out = a.classical_inputs;
  for (const Command& c : a.commands)
    if (c.op == Command::Op::Recv) out.push_back(c.binding);
  return out;
}

AgentPattern apply_rename(const AgentPattern& a, const AgentRename& rn) {
  AgentPattern out;
  out.name = a.name;
  for (const QName& q : a.qubit_sort) out.qubit_sort.push_back(rn.q(q));
  for (const std::string& ch : a.channel_sort)
    out.channel_sort.push_back(rn.ch(ch));
  for (const std::string& ci : a.classical_inputs)
    out.classical_inputs.push_back(rn.ci(ci));
  std::function<void(SignalExpr&)> fix = [&](SignalExpr& s) {
    if (s.kind == SignalExpr::Kind::Outcome) s.qubit = rn.q(s.qubit);
    if (s.kind == SignalExpr::Kind::Input) s.input = rn.ci(s.input);
    if (s.kind == SignalExpr::Kind::Sum)
      for (SignalExpr& t : s.terms) fix(t);
  };
  for (Command c : a.commands) {
    if (!c.channel.empty()) c.channel = rn.ch(c.channel);
    if (c.quantum() || c.op == Command::Op::QSend || c.op == Command::Op::QRecv)
      c.q1 = rn.q(c.q1);
    if (c.op == Command::Op::Entangle) c.q2 = rn.q(c.q2);
    if (c.op == Command::Op::Recv) c.binding = rn.ci(c.binding);
    if (c.sig1) fix(*c.sig1);
    if (c.sig2) fix(*c.sig2);
    out.commands.push_back(std::move(c));
  }
  return out;
}
}  // namespace

NetworkDef compose_networks(const NetworkDef& n1, const NetworkDef& n2,
                            const std::vector<std::pair<std::string, std::string>>& agent_pairs,
                            const std::vector<NetworkQubitPair>& qubit_pairs) {
  std::map<std::string, std::string> n2_to_n1;  // n2 agent -> n1 agent
  std::set<std::string> used1;
  for (const auto& [a1, a2] : agent_pairs) {
    if (!find_agent(n1, a1))
      fail(Errc::PairMismatch, "unknown agent " + a1 + " in the first network");
    if (!find_agent(n2, a2))
      fail(Errc::PairMismatch, "unknown agent " + a2 + " in the second network");
    if (!used1.insert(a1).second)
      fail(Errc::PairMismatch, "agent " + a1 + " is paired twice");
    if (!n2_to_n1.emplace(a2, a1).second)
      fail(Errc::PairMismatch, "agent " + a2 + " is paired twice");
  }
  for (const NetworkQubitPair& qp : qubit_pairs) {
    auto it = n2_to_n1.find(qp.n2_agent);
    if (it == n2_to_n1.end() || it->second != qp.n1_agent)
      fail(Errc::PairMismatch,
           "qubit pair links " + qp.n1_agent + " and " + qp.n2_agent +
               ", which are not fused together");
  }

  NetworkDef out;
  out.name = n1.name.empty() || n2.name.empty() ? n1.name + n2.name
                                                : n1.name + "+" + n2.name;

  // resource: disjoint union, renaming second-network variables on collision
  std::set<std::string> res_taken;
  for (const QName& q : n1.resource.space) res_taken.insert(qname_str(q));
  std::map<std::string, QName> res_ren;
  for (const QName& q : n2.resource.space) {
    if (is_concrete(q)) continue;
    std::string nn = fresh_name(qname_str(q), res_taken);
    res_taken.insert(nn);
    if (nn != qname_str(q)) res_ren[qname_str(q)] = QName{nn};
  }
  out.resource = merge_patterns(n1.resource, rename_variables(n2.resource, res_ren));

  std::map<std::string, AgentPattern> merged;  // keyed by final agent name
  std::vector<std::string> order;
  for (const AgentPattern& a : n1.agents) {
    merged[a.name] = a;
    order.push_back(a.name);
  }

  std::map<std::string, AgentRename> renames;   // per n2 agent
  std::map<std::string, std::string> n2_final;  // n2 agent -> final name
  for (const AgentPattern& a : n2.agents) {
    AgentRename rn;
    auto it = n2_to_n1.find(a.name);
    const AgentPattern* host =
        it == n2_to_n1.end() ? nullptr : &merged.at(it->second);

    std::set<std::string> taken_q, taken_ch, taken_ci;
    if (host) {
      for (const QName& q : host->qubit_sort) taken_q.insert(qname_str(q));
      for (const std::string& ch : host->channel_sort) taken_ch.insert(ch);
      for (const std::string& ci : classical_names_of(*host)) taken_ci.insert(ci);
    }
    for (const QName& q : a.qubit_sort) {
      std::string key = qname_str(q);
      bool paired = false;
      for (const NetworkQubitPair& qp : qubit_pairs)
        if (qp.n2_agent == a.name && qp.n2_qubit == q) {
          if (!host ||
              std::find(host->qubit_sort.begin(), host->qubit_sort.end(),
                        qp.n1_qubit) == host->qubit_sort.end())
            fail(Errc::PairMismatch, "qubit " + qname_str(qp.n1_qubit) +
                                         " is not in agent " + qp.n1_agent);
          rn.qubit[key] = qp.n1_qubit;
          paired = true;
        }
      if (paired) continue;
      std::string nn = fresh_name(key, taken_q);
      taken_q.insert(nn);
      if (nn != key) rn.qubit[key] = QName{nn};
    }
    for (const std::string& ch : a.channel_sort) {
      std::string nn = fresh_name(ch, taken_ch);
      taken_ch.insert(nn);
      if (nn != ch) rn.channel[ch] = nn;
    }
    for (const std::string& ci : classical_names_of(a)) {
      if (rn.classical.count(ci)) continue;
      std::string nn = fresh_name(ci, taken_ci);
      taken_ci.insert(nn);
      if (nn != ci) rn.classical[ci] = nn;
    }
    renames[a.name] = rn;

    AgentPattern r = apply_rename(a, rn);
    if (host) {
      AgentPattern& h = merged.at(it->second);
      for (const QName& q : r.qubit_sort)
        if (std::find(h.qubit_sort.begin(), h.qubit_sort.end(), q) ==
            h.qubit_sort.end())
          h.qubit_sort.push_back(q);
      h.channel_sort.insert(h.channel_sort.end(), r.channel_sort.begin(),
                            r.channel_sort.end());
      h.classical_inputs.insert(h.classical_inputs.end(),
                                r.classical_inputs.begin(),
                                r.classical_inputs.end());
      h.commands.insert(h.commands.end(), r.commands.begin(), r.commands.end());
      n2_final[a.name] = it->second;
    } else {
      std::set<std::string> taken_names;
      for (const std::string& nm : order) taken_names.insert(nm);
      r.name = fresh_name(a.name, taken_names);
      merged[r.name] = r;
      order.push_back(r.name);
      n2_final[a.name] = r.name;
    }
  }

  for (const std::string& nm : order) out.agents.push_back(merged.at(nm));

  out.qubit_pairs = n1.qubit_pairs;
  for (QubitPairCfg qp : n2.qubit_pairs) {
    auto rit = res_ren.find(qname_str(qp.resource_qubit));
    if (rit != res_ren.end()) qp.resource_qubit = rit->second;
    qp.agent_qubit = renames.at(qp.agent).q(qp.agent_qubit);
    qp.agent = n2_final.at(qp.agent);
    out.qubit_pairs.push_back(std::move(qp));
  }
  out.channel_pairs = n1.channel_pairs;
  for (ChannelPairCfg cp : n2.channel_pairs) {
    cp.ch1 = renames.at(cp.agent1).ch(cp.ch1);
    cp.ch2 = renames.at(cp.agent2).ch(cp.ch2);
    cp.agent1 = n2_final.at(cp.agent1);
    cp.agent2 = n2_final.at(cp.agent2);
    out.channel_pairs.push_back(std::move(cp));
  }
  return out;
}

}  // namespace dmc
