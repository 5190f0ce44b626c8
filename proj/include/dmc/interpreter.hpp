#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "dmc/command.hpp"
#include "dmc/state.hpp"

namespace dmc {

struct Environment {
  QuantumState q;
  ClassicalState c;
};

struct Branch {
  std::map<std::int64_t, int> outcomes;
  double probability = 1.0;
  Environment env;
};

enum class RunMode { Enumerate, Sample };

struct RunOptions {
  RunMode mode = RunMode::Enumerate;
  std::uint64_t seed = 0;
  double prune_threshold = 1e-12;
};

struct RunResult {
  std::vector<Branch> branches;  // enumerate: all kept branches, DFS order
                                 // (outcome 0 explored before 1); sample: one
  std::int64_t pruned = 0;       // branches dropped below the threshold
};

int eval_signal(const SignalExpr& s, const ClassicalState& c);

// Dependent measurement angle: (-1)^s * alpha + t*pi, normalized.
double dependent_angle(double alpha, int s, int t);

// Execute one quantum command in place. Measure requires `forced_outcome`
// and returns the branch probability; other commands return 1.
double exec_quantum(Environment& env, const Command& cmd,
                    std::optional<int> forced_outcome = std::nullopt);

// Concrete-reference inputs for a run: each input qubit gets a normalized
// amplitude pair; all other referenced qubits must be auxiliaries (first
// touched by E) and start as |+>.
using InputMap = std::map<std::int64_t, Amp2>;

// Run a local (communication-free) command sequence.
RunResult run_sequence(const std::vector<Command>& commands,
                       const InputMap& inputs,
                       const std::map<std::string, int>& classical_inputs,
                       const RunOptions& opts = {});

// Initialize the environment run_sequence would start from (inputs placed,
// auxiliaries discovered and set to |+>).
Environment initial_environment(const std::vector<Command>& commands,
                                const InputMap& inputs,
                                const std::map<std::string, int>& classical_inputs);

Amp2 normalized_input(const Amp2& amps);  // checks/renormalizes, rejects 0

// Run an assembled pattern: like run_sequence, but auxiliary outputs that no
// command touches still come into existence as |+>.
struct AssembledPattern;
RunResult run_pattern(const AssembledPattern& p, const InputMap& inputs,
                      const std::map<std::string, int>& classical_inputs,
                      const RunOptions& opts = {});

}  // namespace dmc
