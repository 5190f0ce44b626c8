// dmc-vm: validate, compile, run and inspect measurement-calculus patterns
// and distributed networks.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmc/compose.hpp"
#include "dmc/error.hpp"
#include "dmc/loader.hpp"
#include "dmc/network.hpp"
#include "dmc/pattern.hpp"
#include "dmc/protocols.hpp"
#include "dmc/report.hpp"
#include "dmc/sexpr.hpp"

namespace {

using namespace dmc;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::UsageError:
    case Errc::IoError:
      return kExitUsage;
    case Errc::Deadlock:
    case Errc::ZeroProbabilityBranch:
    case Errc::OwnershipViolation:
    case Errc::NondeterministicResource:
    case Errc::UnboundOutcome:
    case Errc::UnboundInput:
    case Errc::UnboundSignal:
      return kExitRuntime;
    default:
      return kExitValidation;
  }
}

struct CommonOpts {
  std::string mode = "enumerate";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> cinputs;
  double tol = 1e-9;
  std::string format = "report";
};

std::pair<std::string, std::string> split_eq(const std::string& s, const char* what) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(Errc::UsageError, std::string(what) + " must look like NAME=VALUE, got " + s);
  return {s.substr(0, eq), s.substr(eq + 1)};
}

cplx parse_amplitude(const std::string& text) {
  auto comma = text.find(',');
  try {
    size_t pos = 0;
    if (comma == std::string::npos) {
      double re = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing");
      return cplx(re, 0.0);
    }
    std::string re_s = text.substr(0, comma), im_s = text.substr(comma + 1);
    double re = std::stod(re_s, &pos);
    if (pos != re_s.size()) throw std::invalid_argument("trailing");
    double im = std::stod(im_s, &pos);
    if (pos != im_s.size()) throw std::invalid_argument("trailing");
    return cplx(re, im);
  } catch (const std::exception&) {
    fail(Errc::UsageError, "bad amplitude " + text + " (want RE or RE,IM)");
  }
}

Amp2 parse_state_literal(const std::string& text) {
  double s = 1.0 / std::sqrt(2.0);
  if (text == "0") return {cplx(1.0), cplx(0.0)};
  if (text == "1") return {cplx(0.0), cplx(1.0)};
  if (text == "+") return {cplx(s), cplx(s)};
  if (text == "-") return {cplx(s), cplx(-s)};
  SExpr e = parse_sexpr(text);
  if (e.atom || e.items.size() != 2 || !e.items[0].atom || !e.items[1].atom)
    fail(Errc::UsageError,
         "bad input state " + text + " (want 0, 1, +, -, or \"(a b)\")");
  return {parse_amplitude(e.items[0].text), parse_amplitude(e.items[1].text)};
}

// map a user-facing qubit name onto an assembled reference
std::int64_t pattern_input_ref(const Pattern& p, const AssembledPattern& ap,
                               const std::string& key) {
  auto it = ap.naming.find(key);
  if (it != ap.naming.end()) return it->second;
  try {
    size_t pos = 0;
    std::int64_t v = std::stoll(key, &pos);
    if (pos == key.size()) return v;
  } catch (const std::exception&) {
  }
  std::string hint;
  for (const QName& q : p.inputs) hint += (hint.empty() ? "" : " ") + qname_str(q);
  fail(Errc::UsageError, "unknown qubit " + key +
                             (hint.empty() ? " (pattern has no inputs)"
                                           : " (declared inputs: " + hint + ")"));
}

std::int64_t network_input_ref(const CompiledNetwork& net, const std::string& key) {
  auto dot = key.find('.');
  if (dot != std::string::npos) {
    std::string agent = key.substr(0, dot), name = key.substr(dot + 1);
    for (const CompiledAgent& a : net.agents) {
      if (a.name != agent) continue;
      auto it = a.qubit_names.find(name);
      if (it == a.qubit_names.end())
        fail(Errc::UsageError, "agent " + agent + " has no qubit " + name);
      return it->second;
    }
    fail(Errc::UsageError, "unknown agent " + agent);
  }
  std::optional<std::int64_t> found;
  for (const CompiledAgent& a : net.agents) {
    auto it = a.qubit_names.find(key);
    if (it == a.qubit_names.end()) continue;
    if (found && *found != it->second)
      fail(Errc::UsageError, "qubit " + key + " is ambiguous; qualify it as AGENT." + key);
    found = it->second;
  }
  if (!found) fail(Errc::UsageError, "unknown qubit " + key);
  return *found;
}

std::string network_cinput_name(const CompiledNetwork& net, const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  std::optional<std::string> found;
  for (const CompiledAgent& a : net.agents) {
    std::string qualified = a.name + "." + key;
    for (const Command& c : a.commands) {
      bool uses = false;
      std::function<void(const SignalExpr&)> scan = [&](const SignalExpr& s) {
        if (s.kind == SignalExpr::Kind::Input && s.input == qualified) uses = true;
        for (const SignalExpr& t : s.terms) scan(t);
      };
      if (c.sig1) scan(*c.sig1);
      if (c.sig2) scan(*c.sig2);
      if (uses) {
        if (found && *found != qualified)
          fail(Errc::UsageError, "classical input " + key + " is ambiguous; qualify it");
        found = qualified;
      }
    }
  }
  return found ? *found : key;
}

RunOptions run_options(const CommonOpts& o) {
  RunOptions r;
  if (o.mode == "sample") {
    if (!o.seed) fail(Errc::UsageError, "sample mode requires --seed");
    r.mode = RunMode::Sample;
    r.seed = *o.seed;
  } else if (o.mode == "enumerate") {
    r.mode = RunMode::Enumerate;
  } else {
    fail(Errc::UsageError, "unknown mode " + o.mode + " (want enumerate or sample)");
  }
  return r;
}

ResolvedTarget load_and_resolve(const std::string& file, const std::string& target) {
  if (file.empty()) return resolve_target(nullptr, target);
  Definitions defs = load_definitions_file(file);
  for (const std::string& w : defs.warnings) std::cerr << "warning: " << w << "\n";
  return resolve_target(&defs, target);
}

void require_valid_pattern(const Pattern& p) {
  std::vector<std::string> violations = validate_pattern(p, false);
  if (!violations.empty()) {
    for (const std::string& v : violations) std::cerr << p.name << ": " << v << "\n";
    fail(Errc::ValidationFailed, "pattern " + p.name + " is invalid");
  }
}

void require_valid_network(const NetworkDef& n) {
  std::vector<std::string> violations = validate_network(n);
  if (!violations.empty()) {
    for (const std::string& v : violations) std::cerr << n.name << ": " << v << "\n";
    fail(Errc::ValidationFailed, "network " + n.name + " is invalid");
  }
}

int cmd_validate(const std::string& file) {
  Definitions defs = load_definitions_file(file);
  for (const std::string& w : defs.warnings) std::cerr << "warning: " << w << "\n";
  int bad = 0;
  for (const std::string& name : defs.order) {
    const Definitions::Entry& entry = defs.by_name.at(name);
    std::vector<std::string> violations;
    switch (entry.kind) {
      case Definitions::Entry::Kind::PatternDef:
      case Definitions::Entry::Kind::ComposeDef:
        violations = validate_pattern(entry.pattern, false);
        break;
      case Definitions::Entry::Kind::NetworkDef_:
        violations = validate_network(entry.network);
        break;
    }
    for (const std::string& v : violations) std::cout << name << ": " << v << "\n";
    bad += static_cast<int>(violations.size());
  }
  if (bad == 0) {
    std::cout << defs.order.size() << " definition(s) valid\n";
    return kExitOk;
  }
  return kExitValidation;
}

SExpr qubit_list_sexpr(const std::vector<std::int64_t>& qs) {
  SExpr e = SExpr::make_list({});
  for (std::int64_t q : qs) e.items.push_back(SExpr::make_atom(std::to_string(q)));
  return e;
}

int cmd_compile(const std::string& file, const std::string& target) {
  ResolvedTarget r = load_and_resolve(file, target);
  if (r.pattern) {
    require_valid_pattern(*r.pattern);
    std::cout << print_sexpr(pattern_to_sexpr(*r.pattern)) << "\n";
    return kExitOk;
  }
  require_valid_network(*r.network);
  CompiledNetwork net = compile_network(*r.network);
  SExpr out = SExpr::make_list({SExpr::make_atom("network"), SExpr::make_atom(net.name)});

  SExpr res = SExpr::make_list({SExpr::make_atom("resource")});
  res.items.push_back(qubit_list_sexpr(net.resource.space));
  res.items.push_back(qubit_list_sexpr(net.resource.outputs));
  SExpr rcmds = SExpr::make_list({});
  for (const Command& c : net.resource.commands)
    rcmds.items.push_back(command_to_sexpr(c));
  res.items.push_back(rcmds);
  out.items.push_back(res);

  for (const CompiledAgent& a : net.agents) {
    SExpr ag = SExpr::make_list({SExpr::make_atom("agent"), SExpr::make_atom(a.name)});
    ag.items.push_back(qubit_list_sexpr(a.qubits));
    SExpr chans = SExpr::make_list({});
    for (const auto& [sort_name, id] : a.channel_names)
      chans.items.push_back(SExpr::make_atom(id));
    ag.items.push_back(chans);
    SExpr cmds = SExpr::make_list({});
    for (const Command& c : a.commands) cmds.items.push_back(command_to_sexpr(c));
    ag.items.push_back(cmds);
    out.items.push_back(ag);
  }
  std::cout << print_sexpr(out) << "\n";
  return kExitOk;
}

int cmd_run(const std::string& file, const std::string& target, const CommonOpts& o) {
  ResolvedTarget r = load_and_resolve(file, target);
  RunOptions ropts = run_options(o);

  if (r.pattern) {
    require_valid_pattern(*r.pattern);
    FreshAlloc alloc;
    AssembledPattern ap = assemble(*r.pattern, alloc);
    InputMap inputs;
    for (const std::string& s : o.inputs) {
      auto [key, value] = split_eq(s, "--input");
      inputs[pattern_input_ref(*r.pattern, ap, key)] = parse_state_literal(value);
    }
    std::map<std::string, int> cinputs;
    for (const std::string& s : o.cinputs) {
      auto [key, value] = split_eq(s, "--cinput");
      cinputs[key] = value == "1" ? 1 : 0;
    }
    RunResult res = run_pattern(ap, inputs, cinputs, ropts);
    std::cout << (o.format == "sexpr" ? sexpr_branches(res) : report_branches(res));
    return kExitOk;
  }

  require_valid_network(*r.network);
  CompiledNetwork net = compile_network(*r.network);
  InputMap inputs;
  for (const std::string& s : o.inputs) {
    auto [key, value] = split_eq(s, "--input");
    inputs[network_input_ref(net, key)] = parse_state_literal(value);
  }
  std::map<std::string, int> cinputs;
  for (const std::string& s : o.cinputs) {
    auto [key, value] = split_eq(s, "--cinput");
    cinputs[network_cinput_name(net, key)] = value == "1" ? 1 : 0;
  }
  NetworkRunOptions nopts;
  nopts.run = ropts;
  nopts.tol = o.tol;
  NetworkRunResult res = run_network(net, inputs, cinputs, nopts);
  std::cout << (o.format == "sexpr" ? sexpr_branches(res) : report_branches(res));
  return kExitOk;
}

std::string qname_text(const QName& q) { return qname_str(q); }

int cmd_graph(const std::string& file, const std::string& target) {
  ResolvedTarget r = load_and_resolve(file, target);
  if (r.network) {
    const NetworkDef& n = *r.network;
    std::cout << "graph " << n.name << "\n";
    std::cout << "node resource outputs:";
    for (const QName& q : n.resource.outputs) std::cout << " " << qname_text(q);
    std::cout << "\n";
    for (const AgentPattern& a : n.agents) {
      std::cout << "node " << a.name << " qubits:";
      for (const QName& q : a.qubit_sort) std::cout << " " << qname_text(q);
      std::cout << " channels:";
      for (const std::string& c : a.channel_sort) std::cout << " " << c;
      std::cout << "\n";
    }
    for (const QubitPairCfg& qp : n.qubit_pairs)
      std::cout << "edge resource." << qname_text(qp.resource_qubit) << " -> "
                << qp.agent << "." << qname_text(qp.agent_qubit) << " [qubit]\n";
    for (const ChannelPairCfg& cp : n.channel_pairs)
      std::cout << "edge " << cp.agent1 << "." << cp.ch1 << " -- " << cp.agent2
                << "." << cp.ch2 << " [channel]\n";
    return kExitOk;
  }
  if (r.compose) {
    const CompositionExpr& c = *r.compose;
    std::cout << "graph " << r.name << "\n";
    for (const NodeInst& n : c.nodes) {
      std::cout << "node " << n.id << " inputs:";
      for (const QName& q : n.pattern.inputs) std::cout << " " << qname_text(q);
      std::cout << " outputs:";
      for (const QName& q : n.pattern.outputs) std::cout << " " << qname_text(q);
      std::cout << "\n";
    }
    for (const LinkPair& p : c.pairs)
      std::cout << "edge " << p.from_node << "." << qname_text(p.from_name) << " -> "
                << p.to_node << "." << qname_text(p.to_name) << "\n";
    return kExitOk;
  }
  const Pattern& p = *r.pattern;
  std::cout << "graph " << (p.name.empty() ? r.name : p.name) << "\n";
  std::cout << "node " << (p.name.empty() ? r.name : p.name) << " inputs:";
  for (const QName& q : p.inputs) std::cout << " " << qname_text(q);
  std::cout << " outputs:";
  for (const QName& q : p.outputs) std::cout << " " << qname_text(q);
  std::cout << "\n";
  return kExitOk;
}

int cmd_list_builtins() {
  for (const BuiltinInfo& b : builtin_list()) {
    std::cout << b.name;
    if (!b.parameter.empty())
      std::cout << "(" << b.parameter << "=" << b.default_arg << ")";
    std::cout << "  [" << (b.is_network ? "network" : "pattern") << "]  " << b.summary
              << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual machine for distributed measurement-calculus patterns"};
  app.require_subcommand(1);

  CommonOpts opts;
  if (const char* env = std::getenv("DMC_TOL")) opts.tol = std::atof(env);

  std::string v_file;
  CLI::App* validate = app.add_subcommand("validate", "check a definition file");
  validate->add_option("file", v_file, "definition file")->required();

  std::string c_file, c_target;
  CLI::App* compile = app.add_subcommand("compile", "print a compiled target");
  compile->add_option("file-or-target", c_file, "definition file (or target)")->required();
  compile->add_option("target", c_target, "target name");

  std::string r_file, r_target;
  CLI::App* run = app.add_subcommand("run", "execute a pattern or network");
  run->add_option("file-or-target", r_file, "definition file (or target)")->required();
  run->add_option("target", r_target, "target name");
  run->add_option("--mode", opts.mode, "enumerate (default) or sample");
  run->add_option("--seed", opts.seed, "PRNG seed (required with --mode sample)");
  run->add_option("--input", opts.inputs, "qubit input, NAME=0|1|+|-|\"(a b)\"");
  run->add_option("--cinput", opts.cinputs, "classical input bit, NAME=0|1");
  run->add_option("--tol", opts.tol, "tolerance (default 1e-9 or $DMC_TOL)");
  run->add_option("--format", opts.format, "report (default) or sexpr");

  std::string g_file, g_target;
  CLI::App* graph = app.add_subcommand("graph", "dump a composition or network graph");
  graph->add_option("file-or-target", g_file, "definition file (or target)")->required();
  graph->add_option("target", g_target, "target name");

  app.add_subcommand("list-builtins", "list the builtin protocol library");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  auto positional = [](std::string& file, std::string& target) {
    if (target.empty()) {
      target = file;
      file.clear();
    }
  };

  try {
    if (validate->parsed()) return cmd_validate(v_file);
    if (compile->parsed()) {
      positional(c_file, c_target);
      return cmd_compile(c_file, c_target);
    }
    if (run->parsed()) {
      positional(r_file, r_target);
      return cmd_run(r_file, r_target, opts);
    }
    if (graph->parsed()) {
      positional(g_file, g_target);
      return cmd_graph(g_file, g_target);
    }
    return cmd_list_builtins();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
