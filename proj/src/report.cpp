#include "dmc/report.hpp"

#include <cstdio>
#include <sstream>

namespace dmc {

namespace {
std::string outcomes_sexpr(const std::map<std::int64_t, int>& outcomes) {
  std::string s = "(outcomes";
  for (const auto& [q, bit] : outcomes)
    s += " (" + std::to_string(q) + " " + std::to_string(bit) + ")";
  return s + ")";
}

std::string inputs_sexpr(const ClassicalState& c) {
  if (c.inputs.empty()) return "";
  std::string s = " (inputs";
  for (const auto& [name, bit] : c.inputs)
    s += " (" + name + " " + std::to_string(bit) + ")";
  return s + ")";
}

std::string ownership_sexpr(const std::map<std::int64_t, std::string>& owner) {
  std::string s = " (ownership";
  for (const auto& [q, agent] : owner)
    s += " (" + std::to_string(q) + " " + agent + ")";
  return s + ")";
}
}  // namespace

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f", p);
  return buf;
}

std::string branch_sexpr(const Branch& b) {
  return "(branch " + outcomes_sexpr(b.outcomes) + " (prob " +
         format_probability(b.probability) + ")" + inputs_sexpr(b.env.c) +
         " " + dump_state(b.env.q) + ")";
}

std::string branch_sexpr(const NetBranch& b) {
  return "(branch " + outcomes_sexpr(b.outcomes) + " (prob " +
         format_probability(b.probability) + ")" + inputs_sexpr(b.env.c) +
         ownership_sexpr(b.owner) + " " + dump_state(b.env.q) + ")";
}

namespace {
template <class Result>
std::string sexpr_impl(const Result& r) {
  std::ostringstream out;
  out << "(branches";
  for (const auto& b : r.branches) out << "\n  " << branch_sexpr(b);
  out << ")";
  if (r.pruned) out << "\n; pruned " << r.pruned << " branch(es) below threshold";
  out << "\n";
  return out.str();
}

void report_head(std::ostringstream& out, size_t count, std::int64_t pruned) {
  out << count << " branch(es)";
  if (pruned) out << " (" << pruned << " pruned below threshold)";
  out << "\n";
}

void report_common(std::ostringstream& out, const std::map<std::int64_t, int>& outcomes,
                   double prob, const ClassicalState& c) {
  out << "  prob " << format_probability(prob) << "  outcomes:";
  if (outcomes.empty()) out << " (none)";
  for (const auto& [q, bit] : outcomes) out << " " << q << "=" << bit;
  for (const auto& [name, bit] : c.inputs) out << " " << name << "=" << bit;
  out << "\n";
}
}  // namespace

std::string report_branches(const RunResult& r) {
  std::ostringstream out;
  report_head(out, r.branches.size(), r.pruned);
  for (const Branch& b : r.branches) {
    report_common(out, b.outcomes, b.probability, b.env.c);
    out << "    " << dump_state(b.env.q) << "\n";
  }
  return out.str();
}

std::string report_branches(const NetworkRunResult& r) {
  std::ostringstream out;
  report_head(out, r.branches.size(), r.pruned);
  for (const NetBranch& b : r.branches) {
    report_common(out, b.outcomes, b.probability, b.env.c);
    if (!b.owner.empty()) {
      out << "    owners:";
      for (const auto& [q, agent] : b.owner) out << " " << q << ":" << agent;
      out << "\n";
    }
    out << "    " << dump_state(b.env.q) << "\n";
  }
  return out.str();
}

std::string sexpr_branches(const RunResult& r) { return sexpr_impl(r); }
std::string sexpr_branches(const NetworkRunResult& r) { return sexpr_impl(r); }

}  // namespace dmc
