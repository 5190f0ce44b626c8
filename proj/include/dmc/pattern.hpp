#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dmc/command.hpp"

namespace dmc {

// A measurement pattern: computation space V, inputs I, outputs O, and the
// command sequence stored in execution (left-to-right) order.
struct Pattern {
  std::string name;  // optional, for reporting
  std::vector<QName> space;
  std::vector<QName> inputs;
  std::vector<QName> outputs;
  std::vector<Command> commands;
  std::vector<std::string> params;  // symbolic angle parameters

  bool distributed() const;  // any communication command present
};

// Structural checks; returns human-readable violations (empty = valid).
// When `allow_distributed` is false, communication commands are violations.
std::vector<std::string> validate_pattern(const Pattern& p,
                                          bool allow_distributed = false);

// Monotone allocator for fresh concrete references.
struct FreshAlloc {
  std::int64_t next = 0;
  std::int64_t alloc() { return next++; }
};

struct AssembledPattern {
  std::vector<std::int64_t> space;
  std::vector<std::int64_t> inputs;
  std::vector<std::int64_t> outputs;
  std::vector<Command> commands;           // all references concrete
  std::map<std::string, std::int64_t> naming;  // variable -> reference
};

// Replace each distinct variable with a fresh reference, in order of first
// appearance (space, inputs, outputs, then commands). Pre-existing concrete
// references pass through; a collision with a freshly allocated reference is
// an error.
AssembledPattern assemble(const Pattern& p, FreshAlloc& alloc);

// Substitute values for the named angle parameters (all must be given).
Pattern instantiate_params(const Pattern& p,
                           const std::map<std::string, double>& values);

// (V I O CMDS) with an optional name/params wrapper handled by the callers.
Pattern parse_pattern_body(const SExpr& v, const SExpr& i, const SExpr& o,
                           const SExpr& cmds, const CommandParseOptions& opts);
Pattern parse_pattern_def(const SExpr& e);  // (V I O CMDS)
SExpr pattern_to_sexpr(const Pattern& p);

std::vector<QName> parse_name_list(const SExpr& e);
SExpr name_list_to_sexpr(const std::vector<QName>& names);

}  // namespace dmc
