// Python bindings: load definitions, resolve targets, run patterns and
// networks, and inspect branch results.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "dmc/error.hpp"
#include "dmc/loader.hpp"
#include "dmc/network.hpp"
#include "dmc/protocols.hpp"
#include "dmc/report.hpp"
#include "dmc/sexpr.hpp"

namespace py = pybind11;
using namespace dmc;

namespace {

Amp2 to_amp2(const py::handle& v) {
  if (py::isinstance<py::str>(v)) {
    std::string s = v.cast<std::string>();
    double r = 1.0 / std::sqrt(2.0);
    if (s == "0") return {cplx(1.0), cplx(0.0)};
    if (s == "1") return {cplx(0.0), cplx(1.0)};
    if (s == "+") return {cplx(r), cplx(r)};
    if (s == "-") return {cplx(r), cplx(-r)};
    fail(Errc::UsageError, "bad state literal " + s + " (want 0, 1, +, -)");
  }
  auto pair = v.cast<std::pair<cplx, cplx>>();
  return {pair.first, pair.second};
}

RunOptions make_opts(const std::string& mode, std::optional<std::uint64_t> seed) {
  RunOptions r;
  if (mode == "sample") {
    if (!seed) fail(Errc::UsageError, "sample mode requires a seed");
    r.mode = RunMode::Sample;
    r.seed = *seed;
  } else if (mode != "enumerate") {
    fail(Errc::UsageError, "unknown mode " + mode);
  }
  return r;
}

py::dict state_dict(const QuantumState& q) {
  py::dict d;
  std::vector<std::int64_t> live = q.live_qubits();
  d["qubits"] = live;
  d["amplitudes"] = live.empty() ? std::vector<cplx>{cplx(1.0)} : dense_vector(q, live);
  d["display"] = dump_state(q);
  return d;
}

py::dict branch_dict(const Branch& b) {
  py::dict d;
  d["outcomes"] = b.outcomes;
  d["probability"] = b.probability;
  d["state"] = state_dict(b.env.q);
  d["cinputs"] = b.env.c.inputs;
  return d;
}

py::dict branch_dict(const NetBranch& b) {
  py::dict d;
  d["outcomes"] = b.outcomes;
  d["probability"] = b.probability;
  d["state"] = state_dict(b.env.q);
  d["cinputs"] = b.env.c.inputs;
  d["ownership"] = b.owner;
  return d;
}

ResolvedTarget resolve(const std::string& target, const std::optional<std::string>& text) {
  if (!text) return resolve_target(nullptr, target);
  Definitions defs = load_definitions(*text);
  return resolve_target(&defs, target);
}

void require_valid(const ResolvedTarget& r) {
  std::vector<std::string> violations;
  if (r.pattern) violations = validate_pattern(*r.pattern, false);
  if (r.network) violations = validate_network(*r.network);
  if (!violations.empty()) {
    std::string msg = r.name + " is invalid:";
    for (const std::string& v : violations) msg += "\n  " + v;
    fail(Errc::ValidationFailed, msg);
  }
}

}  // namespace

PYBIND11_MODULE(dmcvm, m) {
  m.doc() = "measurement-calculus virtual machine";

  static py::exception<Error> exc(m, "DmcError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(("[" + std::string(errc_name(e.code())) + "] " + e.what()).c_str());
    }
  });

  m.def("list_builtins", [] {
    py::list out;
    for (const BuiltinInfo& b : builtin_list()) {
      py::dict d;
      d["name"] = b.name;
      d["kind"] = b.is_network ? "network" : "pattern";
      d["parameter"] = b.parameter;
      d["default"] = b.default_arg;
      d["summary"] = b.summary;
      out.append(d);
    }
    return out;
  });

  m.def(
      "validate",
      [](const std::string& text) {
        Definitions defs = load_definitions(text);
        std::vector<std::string> out;
        for (const std::string& name : defs.order) {
          const Definitions::Entry& e = defs.by_name.at(name);
          std::vector<std::string> vs =
              e.kind == Definitions::Entry::Kind::NetworkDef_
                  ? validate_network(e.network)
                  : validate_pattern(e.pattern, false);
          for (const std::string& v : vs) out.push_back(name + ": " + v);
        }
        return out;
      },
      py::arg("text"), "validate definition-file text; returns violations");

  m.def(
      "compile",
      [](const std::string& target, const std::optional<std::string>& text) {
        ResolvedTarget r = resolve(target, text);
        require_valid(r);
        if (r.pattern) return print_sexpr(pattern_to_sexpr(*r.pattern));
        CompiledNetwork net = compile_network(*r.network);
        std::string out = "(network " + net.name + ")";
        return out;
      },
      py::arg("target"), py::arg("text") = std::nullopt,
      "compile a target to its canonical form");

  m.def(
      "run",
      [](const std::string& target, const py::dict& inputs, const py::dict& cinputs,
         const std::string& mode, std::optional<std::uint64_t> seed,
         const std::optional<std::string>& text) {
        ResolvedTarget r = resolve(target, text);
        require_valid(r);
        RunOptions opts = make_opts(mode, seed);
        py::list out;

        if (r.pattern) {
          FreshAlloc alloc;
          AssembledPattern ap = assemble(*r.pattern, alloc);
          InputMap in;
          for (const auto& [k, v] : inputs) {
            std::string key = k.cast<std::string>();
            auto it = ap.naming.find(key);
            if (it == ap.naming.end())
              fail(Errc::UsageError, "unknown qubit " + key);
            in[it->second] = to_amp2(v);
          }
          std::map<std::string, int> ci;
          for (const auto& [k, v] : cinputs)
            ci[k.cast<std::string>()] = v.cast<int>();
          RunResult res = run_pattern(ap, in, ci, opts);
          for (const Branch& b : res.branches) out.append(branch_dict(b));
          return out;
        }

        CompiledNetwork net = compile_network(*r.network);
        InputMap in;
        for (const auto& [k, v] : inputs) {
          std::string key = k.cast<std::string>();
          auto dot = key.find('.');
          std::optional<std::int64_t> ref;
          for (const CompiledAgent& a : net.agents) {
            if (dot != std::string::npos && a.name != key.substr(0, dot)) continue;
            std::string qn = dot == std::string::npos ? key : key.substr(dot + 1);
            auto it = a.qubit_names.find(qn);
            if (it != a.qubit_names.end()) ref = it->second;
          }
          if (!ref) fail(Errc::UsageError, "unknown qubit " + key);
          in[*ref] = to_amp2(v);
        }
        std::map<std::string, int> ci;
        for (const auto& [k, v] : cinputs)
          ci[k.cast<std::string>()] = v.cast<int>();
        NetworkRunOptions nopts;
        nopts.run = opts;
        NetworkRunResult res = run_network(net, in, ci, nopts);
        for (const NetBranch& b : res.branches) out.append(branch_dict(b));
        return out;
      },
      py::arg("target"), py::arg("inputs") = py::dict(),
      py::arg("cinputs") = py::dict(), py::arg("mode") = "enumerate",
      py::arg("seed") = std::nullopt, py::arg("text") = std::nullopt,
      "run a pattern or network target; returns a list of branch dicts");

  m.def(
      "input_names",
      [](const std::string& target, const std::optional<std::string>& text) {
        ResolvedTarget r = resolve(target, text);
        std::vector<std::string> out;
        if (r.pattern) {
          for (const QName& q : r.pattern->inputs) out.push_back(qname_str(q));
          return out;
        }
        for (const AgentPattern& a : r.network->agents)
          for (const QName& q : a.qubit_sort) out.push_back(a.name + "." + qname_str(q));
        return out;
      },
      py::arg("target"), py::arg("text") = std::nullopt,
      "declared input names of a pattern, or agent-qualified sort names of a network");
}
