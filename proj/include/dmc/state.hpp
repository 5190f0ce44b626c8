#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dmc {

using cplx = std::complex<double>;
using Amp2 = std::array<cplx, 2>;  // single-qubit amplitude pair (a0, a1)

// One entangled component: an ordered qubit list plus a dense amplitude
// vector of length 2^n. The first listed qubit is the most significant bit
// of the vector index.
struct Tangle {
  std::vector<std::int64_t> qubits;
  std::vector<cplx> amps;

  size_t arity() const { return qubits.size(); }
  int position_of(std::int64_t q) const;  // -1 if absent
};

// A quantum state is a set of tangles over pairwise-disjoint qubit sets.
struct QuantumState {
  std::vector<Tangle> tangles;

  bool has_qubit(std::int64_t q) const;
  // (tangle index, bit position) of q; throws UnknownQubit otherwise.
  std::pair<int, int> locate(std::int64_t q) const;
  std::vector<std::int64_t> live_qubits() const;  // sorted

  // Introduce a fresh single-qubit tangle.
  void add_qubit(std::int64_t q, const Amp2& amps);
  void add_plus(std::int64_t q);  // |+>

  // Merge the tangles holding a and b into one (no-op when already shared).
  void merge_for(std::int64_t a, std::int64_t b);

  void apply_cz(std::int64_t a, std::int64_t b);  // merges first
  void apply_x(std::int64_t q);
  void apply_z(std::int64_t q);

  // Project q onto outcome `bit` of the XY-plane basis at `angle`,
  // remove q, renormalize; returns the branch probability (may be ~0;
  // caller decides whether to prune). A zero-probability branch leaves
  // the state unusable.
  double measure(std::int64_t q, double angle, int bit);

  void check_invariants() const;  // disjointness, sizes, normalization
};

// Dense vector over `order` (first qubit = most significant bit) obtained by
// tensoring tangles and reordering; `order` must be exactly the live qubits.
std::vector<cplx> dense_vector(const QuantumState& s,
                               const std::vector<std::int64_t>& order);

// True when a == b up to a global phase, per-amplitude tolerance `tol`.
bool same_up_to_phase(const std::vector<cplx>& a, const std::vector<cplx>& b,
                      double tol);

double norm2(const std::vector<cplx>& v);

// Canonical text form: "(state (tangle (q ...) (re im ...)) ...)",
// tangles ordered by smallest qubit, visible digits capped at 12.
std::string dump_state(const QuantumState& s);

struct ClassicalState {
  std::map<std::int64_t, int> outcomes;   // measurement results
  std::map<std::string, int> inputs;      // classical input bits
};

}  // namespace dmc
