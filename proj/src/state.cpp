#include "dmc/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dmc/command.hpp"
#include "dmc/error.hpp"

namespace dmc {

namespace {
size_t checked_pow2(size_t n) {
  if (n > 30) fail(Errc::LengthMismatch, "tangle too large: 2^" + std::to_string(n));
  return size_t{1} << n;
}
}  // namespace

int Tangle::position_of(std::int64_t q) const {
  for (size_t i = 0; i < qubits.size(); ++i)
    if (qubits[i] == q) return static_cast<int>(i);
  return -1;
}

bool QuantumState::has_qubit(std::int64_t q) const {
  for (const Tangle& t : tangles)
    if (t.position_of(q) >= 0) return true;
  return false;
}

std::pair<int, int> QuantumState::locate(std::int64_t q) const {
  for (size_t i = 0; i < tangles.size(); ++i) {
    int p = tangles[i].position_of(q);
    if (p >= 0) return {static_cast<int>(i), p};
  }
  fail(Errc::UnknownQubit, "qubit " + std::to_string(q) + " is not live");
}

std::vector<std::int64_t> QuantumState::live_qubits() const {
  std::vector<std::int64_t> out;
  for (const Tangle& t : tangles)
    out.insert(out.end(), t.qubits.begin(), t.qubits.end());
  std::sort(out.begin(), out.end());
  return out;
}

void QuantumState::add_qubit(std::int64_t q, const Amp2& a) {
  if (has_qubit(q))
    fail(Errc::DuplicateQubit, "qubit " + std::to_string(q) + " already live");
  double n2 = std::norm(a[0]) + std::norm(a[1]);
  if (std::abs(n2 - 1.0) > 1e-6)
    fail(Errc::NonNormalizedInput,
         "state for qubit " + std::to_string(q) + " has norm^2 " +
             format_double_exact(n2));
  double scale = 1.0 / std::sqrt(n2);
  Tangle t;
  t.qubits = {q};
  t.amps = {a[0] * scale, a[1] * scale};
  tangles.push_back(std::move(t));
}

void QuantumState::add_plus(std::int64_t q) {
  constexpr double r = 0.70710678118654752440;
  add_qubit(q, Amp2{cplx{r, 0}, cplx{r, 0}});
}

void QuantumState::merge_for(std::int64_t a, std::int64_t b) {
  auto [ia, pa] = locate(a);
  auto [ib, pb] = locate(b);
  (void)pa;
  (void)pb;
  if (ia == ib) return;
  Tangle& ta = tangles[ia];
  Tangle& tb = tangles[ib];
  Tangle merged;
  merged.qubits = ta.qubits;
  merged.qubits.insert(merged.qubits.end(), tb.qubits.begin(), tb.qubits.end());
  checked_pow2(merged.qubits.size());
  merged.amps.resize(ta.amps.size() * tb.amps.size());
  for (size_t i = 0; i < ta.amps.size(); ++i)
    for (size_t j = 0; j < tb.amps.size(); ++j)
      merged.amps[i * tb.amps.size() + j] = ta.amps[i] * tb.amps[j];
  int lo = std::min(ia, ib), hi = std::max(ia, ib);
  tangles.erase(tangles.begin() + hi);
  tangles[lo] = std::move(merged);
}

void QuantumState::apply_cz(std::int64_t a, std::int64_t b) {
  if (a == b)
    fail(Errc::SameQubit, "E needs two distinct qubits, got " + std::to_string(a));
  merge_for(a, b);
  auto [ti, pa] = locate(a);
  Tangle& t = tangles[ti];
  int pb = t.position_of(b);
  size_t ma = size_t{1} << (t.arity() - 1 - pa);
  size_t mb = size_t{1} << (t.arity() - 1 - pb);
  for (size_t i = 0; i < t.amps.size(); ++i)
    if ((i & ma) && (i & mb)) t.amps[i] = -t.amps[i];
}

void QuantumState::apply_x(std::int64_t q) {
  auto [ti, p] = locate(q);
  Tangle& t = tangles[ti];
  size_t m = size_t{1} << (t.arity() - 1 - p);
  for (size_t i = 0; i < t.amps.size(); ++i)
    if (!(i & m)) std::swap(t.amps[i], t.amps[i | m]);
}

void QuantumState::apply_z(std::int64_t q) {
  auto [ti, p] = locate(q);
  Tangle& t = tangles[ti];
  size_t m = size_t{1} << (t.arity() - 1 - p);
  for (size_t i = 0; i < t.amps.size(); ++i)
    if (i & m) t.amps[i] = -t.amps[i];
}

double QuantumState::measure(std::int64_t q, double angle, int bit) {
  auto [ti, p] = locate(q);
  Tangle& t = tangles[ti];
  size_t n = t.arity();
  size_t low = n - 1 - static_cast<size_t>(p);  // bits below q
  // <+-_angle| = (|0> +- e^{i angle}|1>)^dagger / sqrt(2)
  constexpr double r = 0.70710678118654752440;
  cplx c0{r, 0};
  cplx c1 = std::polar(r, -angle) * (bit == 0 ? 1.0 : -1.0);

  std::vector<cplx> rest(t.amps.size() / 2);
  double prob = 0.0;
  size_t low_mask = (size_t{1} << low) - 1;
  for (size_t rsti = 0; rsti < rest.size(); ++rsti) {
    size_t i0 = ((rsti >> low) << (low + 1)) | (rsti & low_mask);
    size_t i1 = i0 | (size_t{1} << low);
    cplx v = c0 * t.amps[i0] + c1 * t.amps[i1];
    rest[rsti] = v;
    prob += std::norm(v);
  }

  if (n == 1) {
    // prob is |v|^2 of the scalar remainder
    prob = std::norm(rest[0]);
    tangles.erase(tangles.begin() + ti);
    return prob;
  }

  if (prob > 1e-300) {
    double scale = 1.0 / std::sqrt(prob);
    for (cplx& v : rest) v *= scale;
  }
  t.qubits.erase(t.qubits.begin() + p);
  t.amps = std::move(rest);
  return prob;
}

void QuantumState::check_invariants() const {
  std::vector<std::int64_t> seen;
  for (const Tangle& t : tangles) {
    if (t.amps.size() != checked_pow2(t.qubits.size()))
      fail(Errc::LengthMismatch, "tangle amplitude count mismatch");
    double n2 = 0;
    for (const cplx& a : t.amps) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-8)
      fail(Errc::NonNormalizedInput,
           "tangle norm^2 drifted to " + format_double_exact(n2));
    for (std::int64_t q : t.qubits) seen.push_back(q);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    fail(Errc::DuplicateQubit, "tangles share a qubit");
}

std::vector<cplx> dense_vector(const QuantumState& s,
                               const std::vector<std::int64_t>& order) {
  std::vector<std::int64_t> live = s.live_qubits();
  std::vector<std::int64_t> want(order);
  std::sort(want.begin(), want.end());
  if (want != live)
    fail(Errc::OrderMismatch, "order list must be exactly the live qubits");
  if (std::adjacent_find(want.begin(), want.end()) != want.end())
    fail(Errc::DuplicateQubit, "duplicate qubit in order list");

  // tensor all tangles together, then permute into `order`
  std::vector<std::int64_t> qs;
  std::vector<cplx> v{cplx{1, 0}};
  for (const Tangle& t : s.tangles) {
    std::vector<cplx> next(v.size() * t.amps.size());
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = 0; j < t.amps.size(); ++j)
        next[i * t.amps.size() + j] = v[i] * t.amps[j];
    v = std::move(next);
    qs.insert(qs.end(), t.qubits.begin(), t.qubits.end());
  }

  size_t n = qs.size();
  std::vector<size_t> shift(n);  // source bit shift for each order position
  for (size_t k = 0; k < n; ++k) {
    size_t src = 0;
    while (qs[src] != order[k]) ++src;
    shift[k] = n - 1 - src;
  }
  std::vector<cplx> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t j = 0;
    for (size_t k = 0; k < n; ++k)
      j = (j << 1) | ((i >> shift[k]) & 1);
    out[j] = v[i];
  }
  return out;
}

double norm2(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& a : v) s += std::norm(a);
  return s;
}

bool same_up_to_phase(const std::vector<cplx>& a, const std::vector<cplx>& b,
                      double tol) {
  if (a.size() != b.size()) return false;
  // phase from the largest component of a
  size_t best = 0;
  double mag = -1;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > mag) mag = std::abs(a[i]), best = i;
  if (mag <= tol) return norm2(b) <= tol * tol;
  if (std::abs(b[best]) < 1e-300) return false;
  cplx phase = a[best] / b[best];
  double pm = std::abs(phase);
  if (std::abs(pm - 1.0) > 1e-6) return false;
  phase /= pm;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - phase * b[i]) > tol) return false;
  return true;
}

namespace {
std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;  // flush -0
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

std::string dump_state(const QuantumState& s) {
  // canonical: tangles ordered by smallest qubit, qubits ascending inside
  std::vector<const Tangle*> ts;
  for (const Tangle& t : s.tangles) ts.push_back(&t);
  auto min_q = [](const Tangle* t) {
    return *std::min_element(t->qubits.begin(), t->qubits.end());
  };
  std::sort(ts.begin(), ts.end(),
            [&](const Tangle* a, const Tangle* b) { return min_q(a) < min_q(b); });

  std::string out = "(state";
  for (const Tangle* t : ts) {
    std::vector<std::int64_t> order = t->qubits;
    std::sort(order.begin(), order.end());
    QuantumState one;
    one.tangles.push_back(*t);
    std::vector<cplx> amps = dense_vector(one, order);
    out += " (tangle (";
    for (size_t i = 0; i < order.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(order[i]);
    }
    out += ") (";
    for (size_t i = 0; i < amps.size(); ++i) {
      if (i) out += ' ';
      out += fmt12(amps[i].real());
      out += ' ';
      out += fmt12(amps[i].imag());
    }
    out += "))";
  }
  out += ")";
  return out;
}

}  // namespace dmc
