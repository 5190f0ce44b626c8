#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmc/interpreter.hpp"
#include "dmc/pattern.hpp"

namespace dmc {

// One agent of a distributed pattern: the qubits it may touch, the channels
// it may use, its command sequence, and declared classical inputs.
struct AgentPattern {
  std::string name;
  std::vector<QName> qubit_sort;
  std::vector<std::string> channel_sort;
  std::vector<Command> commands;
  std::vector<std::string> classical_inputs;
};

struct QubitPairCfg {
  QName resource_qubit;  // an output of the resource pattern
  std::string agent;
  QName agent_qubit;  // a qubit-sort name of that agent
};

struct ChannelPairCfg {
  std::string agent1, ch1;
  std::string agent2, ch2;
};

struct NetworkDef {
  std::string name;
  Pattern resource;  // local pattern, no inputs
  std::vector<AgentPattern> agents;
  std::vector<QubitPairCfg> qubit_pairs;
  std::vector<ChannelPairCfg> channel_pairs;
};

std::vector<std::string> validate_network(const NetworkDef& n);

struct CompiledAgent {
  std::string name;
  std::vector<std::int64_t> qubits;                 // sort, concrete
  std::map<std::string, std::int64_t> qubit_names;  // sort name -> reference
  std::map<std::string, std::string> channel_names; // sort name -> channel id
  std::vector<Command> commands;  // concrete refs, global channel ids,
                                  // agent-qualified classical names
};

struct CompiledNetwork {
  std::string name;
  AssembledPattern resource;
  std::vector<CompiledAgent> agents;
  std::vector<std::string> channels;  // global ids, declaration order
  std::map<std::int64_t, std::string> initial_owner;
};

CompiledNetwork compile_network(const NetworkDef& n);

// A value in flight on a channel.
struct ChannelValue {
  enum class Kind { Bit, Qubit } kind = Kind::Bit;
  int bit = 0;
  std::int64_t qubit = 0;
};

struct NetBranch {
  std::map<std::int64_t, int> outcomes;
  double probability = 1.0;
  Environment env;
  std::map<std::int64_t, std::string> owner;  // live qubits at the end
};

struct NetworkRunResult {
  std::vector<NetBranch> branches;
  std::int64_t pruned = 0;
};

struct NetworkRunOptions {
  RunOptions run;
  std::vector<int> agent_order;  // permutation; empty = declaration order
  bool rendezvous = false;       // synchronous handoff instead of one-slot
  double tol = 1e-9;             // resource-determinism tolerance
};

// Execute the network. The resource pattern runs first (it must be
// deterministic); `resource_state` overrides it with an externally produced
// state whose live qubits must be exactly the resource outputs.
NetworkRunResult run_network(const CompiledNetwork& net, const InputMap& inputs,
                             const std::map<std::string, int>& classical_inputs,
                             const NetworkRunOptions& opts = {},
                             const QuantumState* resource_state = nullptr);

// Merge two networks into one: paired agents are fused (first network's
// agent name wins), qubit pairs identify an n1-agent-held qubit with an
// n2-agent input qubit, channel namespaces stay disjoint.
struct NetworkQubitPair {
  std::string n1_agent;
  QName n1_qubit;
  std::string n2_agent;
  QName n2_qubit;
};

NetworkDef compose_networks(const NetworkDef& n1, const NetworkDef& n2,
                            const std::vector<std::pair<std::string, std::string>>& agent_pairs,
                            const std::vector<NetworkQubitPair>& qubit_pairs);

}  // namespace dmc
