#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmc/compose.hpp"
#include "dmc/network.hpp"
#include "dmc/pattern.hpp"

namespace dmc {

// --- local patterns ---
Pattern hadamard_pattern();
Pattern j_pattern_symbolic();       // parameter "theta": the measurement angle
Pattern j_pattern(double alpha);    // J(alpha), measures at -alpha
Pattern cz_pattern();
Pattern identity_pattern();
Pattern ghz_pattern(int n);              // n >= 1 outputs, no inputs
Pattern ghz_measurement_pattern(int n);  // n >= 1 inputs, no outputs

// CNOT as a composition (control, target):
CompositionExpr cx_composition();           // explicit three-node shape
CompositionExpr cx_composition_shortcut();  // derived two-H shape
Pattern cx_pattern();                       // compiled shortcut form

// --- distributed protocols ---
NetworkDef tp_network();            // two agents, one teleported qubit
NetworkDef es_network(int n);       // leader + n+1 agents, GHZ sharing
NetworkDef es_network_merged(int n);  // leader absorbs agent 0
NetworkDef sc_network(int n);       // state sharing, GHZ resource included
NetworkDef sc_stage_network(int n); // sharing stage alone, placeholder resource
NetworkDef sc_es_network(int n);    // sharing stage composed onto swapping

// Decode a GHZ-basis measurement: projection string (s_0 = 0) and sign bit,
// from the outcomes of the assembled MGHZ pattern.
struct GhzDecoding {
  std::vector<int> projection;
  int sign = 0;
};
GhzDecoding decode_ghz_measurement(const AssembledPattern& mghz,
                                   const std::map<std::int64_t, int>& outcomes);

// --- registry ---
struct BuiltinInfo {
  std::string name;
  bool is_network = false;
  std::string parameter;    // "", "n", or "alpha"
  std::string default_arg;  // printable default
  std::string summary;
};

const std::vector<BuiltinInfo>& builtin_list();
bool is_builtin_name(const std::string& name);

struct BuiltinTarget {
  std::optional<Pattern> pattern;
  std::optional<NetworkDef> network;
};

// `arg`: empty uses the default ("J" -> 0, sized protocols -> their default).
BuiltinTarget make_builtin(const std::string& name,
                           const std::optional<std::string>& arg);

}  // namespace dmc
