#pragma once

#include <map>
#include <string>
#include <vector>

#include "dmc/pattern.hpp"

namespace dmc {

// A composition is a DAG of pattern instances plus directed link pairs
// (from-instance output qubit -> to-instance input qubit).
struct NodeInst {
  std::string id;
  Pattern pattern;
};

struct LinkPair {
  std::string from_node;
  QName from_name;  // an output of from_node's pattern
  std::string to_node;
  QName to_name;  // an input of to_node's pattern
};

struct CompositionExpr {
  std::vector<NodeInst> nodes;   // declaration order
  std::vector<LinkPair> pairs;   // declaration order
};

// Structural validation: ids unique, endpoints exist, each input is fed at
// most once, each output feeds at most once, graph acyclic.
std::vector<std::string> validate_composition(const CompositionExpr& c);

// Node evaluation order: topological, declaration order breaking ties.
std::vector<int> topo_order(const CompositionExpr& c);

// Canonical qubit names chosen for every (node, local name): linked ends
// share one name. Keys are "<node id>\x1f<local name>".
std::map<std::string, QName> compute_bindings(const CompositionExpr& c);

// Merge of two already-renamed patterns that share link names:
// I = I1 u (I2 \ O1), O = (O1 \ I2) u O2, V = V1 u V2, A = A1 ++ A2.
Pattern merge_patterns(const Pattern& p1, const Pattern& p2);

// Compile the whole composition to a single flat pattern.
Pattern compile_composition(const CompositionExpr& c);

// Sequential composition q = p2 after p1: outputs of p1 feed inputs of p2
// positionally (arities must match).
Pattern seq_compose(const Pattern& p1, const Pattern& p2);

// Parallel composition: disjoint union, no links.
Pattern par_compose(const Pattern& p1, const Pattern& p2);

// Rename a pattern's variables with a prefix so instances cannot collide.
Pattern rename_variables(const Pattern& p,
                         const std::map<std::string, QName>& mapping);

}  // namespace dmc
