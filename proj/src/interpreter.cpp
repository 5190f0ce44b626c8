#include "dmc/interpreter.hpp"

#include <cmath>
#include <set>

#include "dmc/error.hpp"
#include "dmc/pattern.hpp"

namespace dmc {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::int64_t concrete_ref(const QName& q) {
  if (!is_concrete(q))
    fail(Errc::ShapeError,
         "variable " + qname_str(q) + " in a runnable sequence; assemble first");
  return qref(q);
}
}  // namespace

int eval_signal(const SignalExpr& s, const ClassicalState& c) {
  switch (s.kind) {
    case SignalExpr::Kind::Const:
      return s.value & 1;
    case SignalExpr::Kind::Outcome: {
      auto it = c.outcomes.find(concrete_ref(s.qubit));
      if (it == c.outcomes.end())
        fail(Errc::UnboundOutcome,
             "no recorded outcome for qubit " + qname_str(s.qubit));
      return it->second;
    }
    case SignalExpr::Kind::Input: {
      auto it = c.inputs.find(s.input);
      if (it == c.inputs.end())
        fail(Errc::UnboundInput, "no classical input named " + s.input);
      return it->second;
    }
    case SignalExpr::Kind::Sum: {
      int acc = 0;
      for (const SignalExpr& t : s.terms) acc ^= eval_signal(t, c);
      return acc;
    }
  }
  return 0;
}

double dependent_angle(double alpha, int s, int t) {
  double a = (s ? -alpha : alpha) + (t ? kPi : 0.0);
  return normalize_angle(a);
}

double exec_quantum(Environment& env, const Command& cmd,
                    std::optional<int> forced_outcome) {
  auto touch = [&](const QName& q) {
    std::int64_t r = concrete_ref(q);
    if (env.c.outcomes.count(r))
      fail(Errc::AlreadyMeasured,
           "qubit " + std::to_string(r) + " was already measured");
    return r;
  };
  switch (cmd.op) {
    case Command::Op::Entangle:
      env.q.apply_cz(touch(cmd.q1), touch(cmd.q2));
      return 1.0;
    case Command::Op::CorrectX: {
      std::int64_t r = touch(cmd.q1);
      if (!cmd.sig1 || eval_signal(*cmd.sig1, env.c)) env.q.apply_x(r);
      return 1.0;
    }
    case Command::Op::CorrectZ: {
      std::int64_t r = touch(cmd.q1);
      if (!cmd.sig1 || eval_signal(*cmd.sig1, env.c)) env.q.apply_z(r);
      return 1.0;
    }
    case Command::Op::Measure: {
      std::int64_t r = touch(cmd.q1);
      if (cmd.angle.symbolic())
        fail(Errc::MissingParam,
             "angle parameter " + cmd.angle.param + " was never instantiated");
      int s = cmd.sig1 ? eval_signal(*cmd.sig1, env.c) : 0;
      int t = cmd.sig2 ? eval_signal(*cmd.sig2, env.c) : 0;
      double angle = dependent_angle(cmd.angle.value, s, t);
      if (!forced_outcome)
        fail(Errc::ShapeError, "measurement executed without an outcome choice");
      double p = env.q.measure(r, angle, *forced_outcome);
      env.c.outcomes[r] = *forced_outcome;
      return p;
    }
    default:
      fail(Errc::CommunicationInLocalRun,
           "communication command reached the local executor");
  }
}

Amp2 normalized_input(const Amp2& a) {
  double n2 = std::norm(a[0]) + std::norm(a[1]);
  if (std::abs(n2 - 1.0) > 1e-6)
    fail(Errc::NonNormalizedInput,
         "input amplitude pair has norm^2 " + format_double_exact(n2));
  double scale = 1.0 / std::sqrt(n2);
  return {a[0] * scale, a[1] * scale};
}

Environment initial_environment(const std::vector<Command>& commands,
                                const InputMap& inputs,
                                const std::map<std::string, int>& classical_inputs) {
  Environment env;
  env.c.inputs = classical_inputs;
  for (const auto& [q, amps] : inputs) env.q.add_qubit(q, normalized_input(amps));

  // auxiliaries: first touch must be an entangling command
  std::map<std::int64_t, bool> first_is_e;
  auto note = [&](const QName& q, bool entangle) {
    std::int64_t r = concrete_ref(q);
    if (!inputs.count(r) && !first_is_e.count(r)) first_is_e[r] = entangle;
  };
  for (const Command& c : commands) {
    switch (c.op) {
      case Command::Op::Entangle:
        note(c.q1, true);
        note(c.q2, true);
        break;
      case Command::Op::Measure:
      case Command::Op::CorrectX:
      case Command::Op::CorrectZ:
        note(c.q1, false);
        break;
      case Command::Op::Send:
      case Command::Op::Recv:
        break;
      case Command::Op::QSend:
      case Command::Op::QRecv:
        fail(Errc::CommunicationInLocalRun,
             "qubit transfer in a local run");
    }
  }
  for (const auto& [q, ok] : first_is_e) {
    if (!ok)
      fail(Errc::UnknownQubit,
           "qubit " + std::to_string(q) +
               " is neither an input nor first touched by E");
    env.q.add_plus(q);
  }
  return env;
}

namespace {
struct Runner {
  const std::vector<Command>& cmds;
  const RunOptions& opts;
  RunResult out;

  void enumerate(Environment env, size_t idx, double acc) {
    for (; idx < cmds.size(); ++idx) {
      const Command& c = cmds[idx];
      if (c.op == Command::Op::Measure) {
        for (int bit = 0; bit < 2; ++bit) {
          Environment child = env;
          double p = exec_quantum(child, c, bit);
          double nacc = acc * p;
          if (nacc < opts.prune_threshold) {
            ++out.pruned;
            continue;
          }
          enumerate(std::move(child), idx + 1, nacc);
        }
        return;
      }
      if (!c.quantum())
        fail(Errc::CommunicationInLocalRun,
             "communication command in a local run");
      exec_quantum(env, c);
    }
    Branch b;
    b.outcomes = env.c.outcomes;
    b.probability = acc;
    b.env = std::move(env);
    out.branches.push_back(std::move(b));
  }

  void sample(Environment env, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    double acc = 1.0;
    for (const Command& c : cmds) {
      if (c.op == Command::Op::Measure) {
        Environment zero = env;
        double p0 = exec_quantum(zero, c, 0);
        if (uniform() < p0) {
          env = std::move(zero);
          acc *= p0;
        } else {
          acc *= exec_quantum(env, c, 1);
        }
        continue;
      }
      exec_quantum(env, c);
    }
    Branch b;
    b.outcomes = env.c.outcomes;
    b.probability = acc;
    b.env = std::move(env);
    out.branches.push_back(std::move(b));
  }
};
}  // namespace

RunResult run_sequence(const std::vector<Command>& commands,
                       const InputMap& inputs,
                       const std::map<std::string, int>& classical_inputs,
                       const RunOptions& opts) {
  Environment env = initial_environment(commands, inputs, classical_inputs);
  Runner r{commands, opts, {}};
  if (opts.mode == RunMode::Enumerate)
    r.enumerate(std::move(env), 0, 1.0);
  else
    r.sample(std::move(env), opts.seed);
  return std::move(r.out);
}

RunResult run_pattern(const AssembledPattern& p, const InputMap& inputs,
                      const std::map<std::string, int>& classical_inputs,
                      const RunOptions& opts) {
  std::set<std::int64_t> touched;
  for (const Command& c : p.commands) {
    touched.insert(concrete_ref(c.q1));
    if (c.op == Command::Op::Entangle) touched.insert(concrete_ref(c.q2));
  }
  InputMap full = inputs;
  constexpr double r = 0.70710678118654752440;
  for (std::int64_t q : p.outputs)
    if (!touched.count(q) && !full.count(q))
      full[q] = Amp2{cplx{r, 0}, cplx{r, 0}};
  return run_sequence(p.commands, full, classical_inputs, opts);
}

}  // namespace dmc
