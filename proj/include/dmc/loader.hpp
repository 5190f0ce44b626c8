#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dmc/compose.hpp"
#include "dmc/network.hpp"
#include "dmc/pattern.hpp"

namespace dmc {

// Parsed contents of a definition file: named patterns, compositions
// (already compiled to flat patterns), and networks.
struct Definitions {
  struct Entry {
    enum class Kind { PatternDef, ComposeDef, NetworkDef_ } kind;
    Pattern pattern;           // PatternDef / ComposeDef (compiled)
    CompositionExpr compose;   // ComposeDef only (pre-compilation shape)
    NetworkDef network;        // NetworkDef_ only
  };
  std::vector<std::string> order;  // declaration order
  std::map<std::string, Entry> by_name;
  std::vector<std::string> warnings;
};

// Accepts a sequence of toplevel forms:
//   (defpattern NAME (PARAMS...) V I O CMDS)
//   (defcompose NAME (use TARGET as ID)... (link (A.q B.q)...))
//   (defcompose NAME (seq ...)) / (defcompose NAME (par ...))
//   (defnetwork NAME (resource (V I O CMDS))
//                    (agent NAME (QSORT CHSORT CMDS) [(cinputs NAME...)])...
//                    (config (qubits (r.X A.Y)...) (channels (A.c B.c)...)))
// TARGET is a defined name, a builtin name, or (NAME ARG); "compose" is an
// accepted alias for "defcompose".
Definitions load_definitions(const std::string& text);
Definitions load_definitions_file(const std::string& path);

// Resolve "builtin:NAME", "builtin:NAME(ARG)", or a name defined in `defs`.
struct ResolvedTarget {
  std::string name;
  std::optional<Pattern> pattern;
  std::optional<NetworkDef> network;
  std::optional<CompositionExpr> compose;  // set for composition targets
};
ResolvedTarget resolve_target(const Definitions* defs, const std::string& target);

}  // namespace dmc
