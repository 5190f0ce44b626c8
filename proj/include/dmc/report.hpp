#pragma once

#include <string>

#include "dmc/interpreter.hpp"
#include "dmc/network.hpp"

namespace dmc {

// "(branch (outcomes (q bit) ...) (prob p) (state ...))"; probabilities use
// 9 decimal places, amplitudes 12 significant digits.
std::string branch_sexpr(const Branch& b);
std::string branch_sexpr(const NetBranch& b);  // adds "(ownership (q agent) ...)"

std::string format_probability(double p);  // 9 decimal places

// Human-readable listing of a run.
std::string report_branches(const RunResult& r);
std::string report_branches(const NetworkRunResult& r);
std::string sexpr_branches(const RunResult& r);
std::string sexpr_branches(const NetworkRunResult& r);

}  // namespace dmc
