#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using dmc::Command;
using Op = dmc::Command::Op;
using dmc::QName;
using dmc::SignalExpr;

namespace {

std::int64_t ref(const QName& q) {
  if (!std::holds_alternative<std::int64_t>(q))
    throw std::runtime_error("oracle: variable reference");
  return std::get<std::int64_t>(q);
}

struct Sim {
  std::vector<std::int64_t> qubits;  // qubits[i] occupies bit i
  Vec amps{cplx(1.0, 0.0)};
  std::map<std::int64_t, int> outcomes;
  std::map<std::string, int> cinputs;

  int pos(std::int64_t q) const {
    for (size_t i = 0; i < qubits.size(); ++i)
      if (qubits[i] == q) return static_cast<int>(i);
    return -1;
  }

  void add(std::int64_t q, cplx a0, cplx a1) {
    size_t n = amps.size();
    Vec next(2 * n);
    for (size_t k = 0; k < n; ++k) {
      next[k] = amps[k] * a0;
      next[k | n] = amps[k] * a1;
    }
    amps.swap(next);
    qubits.push_back(q);
  }

  void touch(std::int64_t q, bool entangling) {
    if (pos(q) >= 0) return;
    if (!entangling) throw std::runtime_error("oracle: dead or unknown qubit");
    add(q, cplx(1.0 / std::sqrt(2.0), 0.0), cplx(1.0 / std::sqrt(2.0), 0.0));
  }

  void cz(std::int64_t q1, std::int64_t q2) {
    touch(q1, true);
    touch(q2, true);
    size_t m1 = size_t(1) << pos(q1), m2 = size_t(1) << pos(q2);
    for (size_t k = 0; k < amps.size(); ++k)
      if ((k & m1) && (k & m2)) amps[k] = -amps[k];
  }

  void x(std::int64_t q) {
    touch(q, false);
    size_t m = size_t(1) << pos(q);
    for (size_t k = 0; k < amps.size(); ++k)
      if (!(k & m)) std::swap(amps[k], amps[k | m]);
  }

  void z(std::int64_t q) {
    touch(q, false);
    size_t m = size_t(1) << pos(q);
    for (size_t k = 0; k < amps.size(); ++k)
      if (k & m) amps[k] = -amps[k];
  }

  // project onto <bit, beta| = (<0| +- e^{-i beta} <1|)/sqrt(2), remove qubit
  double measure(std::int64_t q, double beta, int bit) {
    touch(q, false);
    int p = pos(q);
    size_t pm = size_t(1) << p, low = pm - 1;
    cplx w = std::polar(1.0 / std::sqrt(2.0), -beta) * (bit ? -1.0 : 1.0);
    Vec next(amps.size() / 2);
    double prob = 0.0;
    for (size_t r = 0; r < next.size(); ++r) {
      size_t i0 = ((r & ~low) << 1) | (r & low);
      cplx a = amps[i0] / std::sqrt(2.0) + amps[i0 | pm] * w;
      next[r] = a;
      prob += std::norm(a);
    }
    if (prob > 1e-300)
      for (cplx& a : next) a /= std::sqrt(prob);
    amps.swap(next);
    qubits.erase(qubits.begin() + p);
    outcomes[q] = bit;
    return prob;
  }
};

int eval_sig(const SignalExpr& s, const Sim& sim) {
  switch (s.kind) {
    case SignalExpr::Kind::Const:
      return s.value;
    case SignalExpr::Kind::Outcome: {
      auto it = sim.outcomes.find(ref(s.qubit));
      if (it == sim.outcomes.end()) throw std::runtime_error("oracle: unbound outcome");
      return it->second;
    }
    case SignalExpr::Kind::Input: {
      auto it = sim.cinputs.find(s.input);
      if (it == sim.cinputs.end()) throw std::runtime_error("oracle: unbound input");
      return it->second;
    }
    case SignalExpr::Kind::Sum: {
      int acc = 0;
      for (const SignalExpr& t : s.terms) acc ^= eval_sig(t, sim);
      return acc;
    }
  }
  throw std::runtime_error("oracle: bad signal");
}

void dfs(Sim sim, const std::vector<Command>& cmds, size_t i, double acc,
         std::vector<Branch>& out) {
  for (; i < cmds.size(); ++i) {
    const Command& c = cmds[i];
    switch (c.op) {
      case Op::Entangle:
        sim.cz(ref(c.q1), ref(c.q2));
        break;
      case Op::CorrectX:
        if (!c.sig1 || eval_sig(*c.sig1, sim)) sim.x(ref(c.q1));
        break;
      case Op::CorrectZ:
        if (!c.sig1 || eval_sig(*c.sig1, sim)) sim.z(ref(c.q1));
        break;
      case Op::Measure: {
        int s = c.sig1 ? eval_sig(*c.sig1, sim) : 0;
        int t = c.sig2 ? eval_sig(*c.sig2, sim) : 0;
        double beta = (s ? -1.0 : 1.0) * c.angle.value + t * M_PI;
        for (int bit : {0, 1}) {
          Sim child = sim;
          double p = child.measure(ref(c.q1), beta, bit);
          if (acc * p <= 0.0) continue;
          dfs(std::move(child), cmds, i + 1, acc * p, out);
        }
        return;
      }
      default:
        throw std::runtime_error("oracle: communication command");
    }
  }
  Branch b;
  b.outcomes = sim.outcomes;
  b.probability = acc;
  b.live = sim.qubits;
  b.amps = sim.amps;
  out.push_back(std::move(b));
}

}  // namespace

std::vector<Branch> enumerate(const std::vector<Command>& cmds,
                              const InputAmps& inputs,
                              const std::map<std::string, int>& cinputs) {
  Sim sim;
  sim.cinputs = cinputs;
  for (const auto& [q, a] : inputs) {
    double n = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
    sim.add(q, a[0] / n, a[1] / n);
  }
  std::vector<Branch> out;
  dfs(std::move(sim), cmds, 0, 1.0, out);
  return out;
}

Vec state_in_order(const Branch& b, const std::vector<std::int64_t>& order) {
  if (order.size() != b.live.size())
    throw std::runtime_error("oracle: order/live size mismatch");
  size_t n = order.size();
  Vec out(b.amps.size());
  std::vector<int> src_bit(n);
  for (size_t j = 0; j < n; ++j) {
    auto it = std::find(b.live.begin(), b.live.end(), order[j]);
    if (it == b.live.end()) throw std::runtime_error("oracle: qubit not live");
    src_bit[j] = static_cast<int>(it - b.live.begin());
  }
  for (size_t k = 0; k < b.amps.size(); ++k) {
    size_t dst = 0;
    for (size_t j = 0; j < n; ++j)
      if (k & (size_t(1) << src_bit[j])) dst |= size_t(1) << (n - 1 - j);
    out[dst] = b.amps[k];
  }
  return out;
}

bool same_up_to_phase(const Vec& a, const Vec& b, double tol) {
  if (a.size() != b.size()) return false;
  size_t imax = 0;
  double best = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > best) best = std::abs(a[i]), imax = i;
  if (best < 1e-12) return false;
  if (std::abs(b[imax]) < 1e-12) return false;
  cplx phase = a[imax] / b[imax];
  phase /= std::abs(phase);
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - phase * b[i]) > tol) return false;
  return true;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

Vec apply_1q(const Vec& v, int n, int pos_msb, const Mat2& m) {
  size_t mask = size_t(1) << (n - 1 - pos_msb);
  Vec out(v.size());
  for (size_t k = 0; k < v.size(); ++k) {
    size_t k0 = k & ~mask, k1 = k | mask;
    if (k & mask)
      out[k] = m[2] * v[k0] + m[3] * v[k1];
    else
      out[k] = m[0] * v[k0] + m[1] * v[k1];
  }
  return out;
}

Vec apply_h_all(const Vec& v, int n) {
  Vec out = v;
  for (int p = 0; p < n; ++p) out = apply_1q(out, n, p, mat_h());
  return out;
}

Vec apply_cz(const Vec& v, int n, int p1_msb, int p2_msb) {
  size_t m1 = size_t(1) << (n - 1 - p1_msb), m2 = size_t(1) << (n - 1 - p2_msb);
  Vec out = v;
  for (size_t k = 0; k < v.size(); ++k)
    if ((k & m1) && (k & m2)) out[k] = -out[k];
  return out;
}

Vec apply_cx(const Vec& v2q) {
  return {v2q[0], v2q[1], v2q[3], v2q[2]};
}

Mat2 mat_h() {
  double s = 1.0 / std::sqrt(2.0);
  return {cplx(s), cplx(s), cplx(s), cplx(-s)};
}

Mat2 mat_j(double alpha) {
  double s = 1.0 / std::sqrt(2.0);
  cplx e = std::polar(1.0, alpha);
  return {cplx(s), s * e, cplx(s), -s * e};
}

Vec ghz_vec(int n) {
  Vec v(size_t(1) << n, cplx(0.0));
  double s = 1.0 / std::sqrt(2.0);
  v.front() = s;
  v.back() = s;
  return v;
}

}  // namespace oracle
