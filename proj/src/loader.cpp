#include "dmc/loader.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "dmc/error.hpp"
#include "dmc/protocols.hpp"
#include "dmc/sexpr.hpp"

namespace dmc {

namespace {

bool is_plain_identifier(const std::string& s) {
  if (s.empty() || s[0] == '?') return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      return false;
  return !std::isdigit(static_cast<unsigned char>(s[0]));
}

std::string want_atom(const SExpr& e, const char* what) {
  if (!e.atom) fail(Errc::ShapeError, std::string("expected ") + what);
  return e.text;
}

std::string want_name(const SExpr& e, const char* what) {
  std::string s = want_atom(e, what);
  if (!is_plain_identifier(s))
    fail(Errc::BadName, std::string(what) + " must be a plain identifier, got " + s);
  return s;
}

// "A.x" -> {"A", "x"}; split at the first dot
std::pair<std::string, std::string> split_dotted(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
    fail(Errc::ShapeError, "expected a dotted NAME.QUBIT reference, got " + s);
  return {s.substr(0, dot), s.substr(dot + 1)};
}

// instantiate a defined pattern's parameters positionally
Pattern apply_args(const Pattern& p, const std::vector<SExpr>& args) {
  if (args.size() != p.params.size())
    fail(Errc::ArityMismatch,
         p.name + " takes " + std::to_string(p.params.size()) +
             " parameter(s), got " + std::to_string(args.size()));
  std::map<std::string, double> values;
  for (size_t i = 0; i < args.size(); ++i)
    values[p.params[i]] = parse_angle(args[i], {}).value;
  Pattern out = instantiate_params(p, values);
  out.name = p.name;
  return out;
}

// a pattern usable inside a composition: a defined name, a builtin name, or
// an application (NAME ARG...)
Pattern target_pattern(const Definitions& defs, const SExpr& e) {
  std::string name;
  std::vector<SExpr> args;
  if (e.atom) {
    name = e.text;
  } else {
    if (e.items.empty() || !e.items[0].atom)
      fail(Errc::ShapeError, "expected NAME or (NAME ARG...) as a composition target");
    name = e.items[0].text;
    args.assign(e.items.begin() + 1, e.items.end());
  }

  auto it = defs.by_name.find(name);
  if (it != defs.by_name.end()) {
    const Definitions::Entry& entry = it->second;
    if (entry.kind == Definitions::Entry::Kind::NetworkDef_)
      fail(Errc::UsageError, name + " is a network; compositions take patterns");
    if (args.empty() && !entry.pattern.params.empty())
      fail(Errc::MissingParam,
           name + " has parameters (" + entry.pattern.params[0] + " ...); apply them");
    return args.empty() ? entry.pattern : apply_args(entry.pattern, args);
  }
  if (is_builtin_name(name)) {
    if (args.size() > 1)
      fail(Errc::ArityMismatch, "builtin " + name + " takes at most one argument");
    std::optional<std::string> arg;
    if (!args.empty()) arg = want_atom(args[0], "builtin argument");
    BuiltinTarget t = make_builtin(name, arg);
    if (!t.pattern)
      fail(Errc::UsageError, name + " is a network; compositions take patterns");
    return *t.pattern;
  }
  fail(Errc::UsageError, "unknown pattern " + name);
}

// recursive (seq ...)/(par ...) group builder; returns the group's dangling
// input/output legs in order so an enclosing seq can pair them positionally
struct GroupLegs {
  std::vector<std::pair<std::string, QName>> inputs, outputs;
};

GroupLegs build_group(const Definitions& defs, const SExpr& e,
                      CompositionExpr& out, int& next_id) {
  if (!e.atom && !e.items.empty() && e.items[0].atom &&
      (e.items[0].text == "seq" || e.items[0].text == "par")) {
    bool seq = e.items[0].text == "seq";
    if (e.items.size() < 2)
      fail(Errc::ShapeError, std::string(seq ? "seq" : "par") + " needs at least one element");
    GroupLegs acc;
    bool first = true;
    for (size_t i = 1; i < e.items.size(); ++i) {
      GroupLegs part = build_group(defs, e.items[i], out, next_id);
      if (first) {
        acc = part;
        first = false;
        continue;
      }
      if (seq) {
        if (acc.outputs.size() != part.inputs.size())
          fail(Errc::ArityMismatch,
               "seq: " + std::to_string(acc.outputs.size()) + " output(s) fed into " +
                   std::to_string(part.inputs.size()) + " input(s)");
        for (size_t k = 0; k < part.inputs.size(); ++k)
          out.pairs.push_back({acc.outputs[k].first, acc.outputs[k].second,
                               part.inputs[k].first, part.inputs[k].second});
        acc.outputs = part.outputs;
      } else {
        acc.inputs.insert(acc.inputs.end(), part.inputs.begin(), part.inputs.end());
        acc.outputs.insert(acc.outputs.end(), part.outputs.begin(), part.outputs.end());
      }
    }
    return acc;
  }

  Pattern p = target_pattern(defs, e);
  std::string id = "n" + std::to_string(++next_id);
  GroupLegs legs;
  for (const QName& q : p.inputs) legs.inputs.push_back({id, q});
  for (const QName& q : p.outputs) legs.outputs.push_back({id, q});
  out.nodes.push_back({id, std::move(p)});
  return legs;
}

Pattern parse_resource_body(const SExpr& e) {
  if (e.atom || e.items.size() != 4)
    fail(Errc::ShapeError, "resource body must be (V I O CMDS)");
  CommandParseOptions opts;
  Pattern p = parse_pattern_body(e.items[0], e.items[1], e.items[2], e.items[3], opts);
  p.name = "R";
  return p;
}

void load_defpattern(Definitions& defs, const SExpr& e) {
  if (e.items.size() != 7)
    fail(Errc::ShapeError, "defpattern needs (defpattern NAME (PARAMS) V I O CMDS)");
  std::string name = want_name(e.items[1], "pattern name");
  if (e.items[2].atom) fail(Errc::ShapeError, "defpattern parameter list must be a list");
  std::vector<std::string> params;
  for (const SExpr& a : e.items[2].items)
    params.push_back(want_name(a, "parameter name"));

  CommandParseOptions opts;
  opts.allow_params = true;
  opts.warnings = &defs.warnings;
  Pattern p = parse_pattern_body(e.items[3], e.items[4], e.items[5], e.items[6], opts);
  p.name = name;
  p.params = std::move(params);

  Definitions::Entry entry;
  entry.kind = Definitions::Entry::Kind::PatternDef;
  entry.pattern = std::move(p);
  if (!defs.by_name.emplace(name, std::move(entry)).second)
    fail(Errc::BadName, "duplicate definition of " + name);
  defs.order.push_back(name);
}

void load_defcompose(Definitions& defs, const SExpr& e) {
  if (e.items.size() < 3)
    fail(Errc::ShapeError, "defcompose needs a name and at least one element");
  std::string name = want_name(e.items[1], "composition name");

  CompositionExpr expr;
  bool grouped = false;
  if (e.items.size() == 3 && !e.items[2].atom && !e.items[2].items.empty() &&
      e.items[2].items[0].atom &&
      (e.items[2].items[0].text == "seq" || e.items[2].items[0].text == "par")) {
    int next_id = 0;
    build_group(defs, e.items[2], expr, next_id);
    grouped = true;
  }

  if (!grouped) {
    for (size_t i = 2; i < e.items.size(); ++i) {
      const SExpr& item = e.items[i];
      if (item.atom || item.items.empty() || !item.items[0].atom)
        fail(Errc::ShapeError, "defcompose elements are (use ...) or (link ...) forms");
      const std::string& head = item.items[0].text;
      if (head == "use") {
        // (use TARGET as ID)
        if (item.items.size() != 4 || want_atom(item.items[2], "'as'") != "as")
          fail(Errc::ShapeError, "expected (use TARGET as ID)");
        std::string id = want_name(item.items[3], "node id");
        for (const NodeInst& n : expr.nodes)
          if (n.id == id) fail(Errc::BadName, "duplicate node id " + id);
        expr.nodes.push_back({id, target_pattern(defs, item.items[1])});
      } else if (head == "link") {
        for (size_t k = 1; k < item.items.size(); ++k) {
          const SExpr& pair = item.items[k];
          if (pair.atom || pair.items.size() != 2)
            fail(Errc::ShapeError, "link pairs are (FROM.QUBIT TO.QUBIT)");
          auto [fn, fq] = split_dotted(want_atom(pair.items[0], "link endpoint"));
          auto [tn, tq] = split_dotted(want_atom(pair.items[1], "link endpoint"));
          expr.pairs.push_back({fn, parse_qname(SExpr::make_atom(fq)), tn,
                                parse_qname(SExpr::make_atom(tq))});
        }
      } else {
        fail(Errc::ShapeError, "unknown defcompose element " + head);
      }
    }
  }

  Definitions::Entry entry;
  entry.kind = Definitions::Entry::Kind::ComposeDef;
  entry.compose = expr;
  entry.pattern = compile_composition(expr);
  entry.pattern.name = name;
  if (!defs.by_name.emplace(name, std::move(entry)).second)
    fail(Errc::BadName, "duplicate definition of " + name);
  defs.order.push_back(name);
}

void load_defnetwork(Definitions& defs, const SExpr& e) {
  if (e.items.size() < 3)
    fail(Errc::ShapeError, "defnetwork needs a name, a resource, agents and a config");
  NetworkDef net;
  net.name = want_name(e.items[1], "network name");

  bool saw_resource = false, saw_config = false;
  for (size_t i = 2; i < e.items.size(); ++i) {
    const SExpr& item = e.items[i];
    if (item.atom || item.items.empty() || !item.items[0].atom)
      fail(Errc::ShapeError, "defnetwork elements are (resource|agent|config ...) forms");
    const std::string& head = item.items[0].text;

    if (head == "resource") {
      if (saw_resource) fail(Errc::ShapeError, "duplicate resource form");
      if (item.items.size() != 2)
        fail(Errc::ShapeError, "expected (resource (V I O CMDS))");
      net.resource = parse_resource_body(item.items[1]);
      saw_resource = true;

    } else if (head == "agent") {
      // (agent NAME (QSORT CHSORT CMDS) [(cinputs NAME...)])
      if (item.items.size() < 3 || item.items.size() > 4)
        fail(Errc::ShapeError, "expected (agent NAME (QSORT CHSORT CMDS) [(cinputs ...)])");
      AgentPattern a;
      a.name = want_name(item.items[1], "agent name");
      const SExpr& body = item.items[2];
      if (body.atom || body.items.size() != 3)
        fail(Errc::ShapeError, "agent body must be (QSORT CHSORT CMDS)");
      a.qubit_sort = parse_name_list(body.items[0]);
      if (body.items[1].atom) fail(Errc::ShapeError, "agent channel sort must be a list");
      for (const SExpr& c : body.items[1].items)
        a.channel_sort.push_back(want_atom(c, "channel name"));
      CommandParseOptions opts;
      opts.allow_distributed = true;
      opts.warnings = &defs.warnings;
      if (body.items[2].atom) fail(Errc::ShapeError, "agent commands must be a list");
      a.commands = parse_command_sequence(body.items[2], opts);
      if (item.items.size() == 4) {
        const SExpr& ci = item.items[3];
        if (ci.atom || ci.items.empty() || !ci.items[0].atom ||
            ci.items[0].text != "cinputs")
          fail(Errc::ShapeError, "expected (cinputs NAME...)");
        for (size_t k = 1; k < ci.items.size(); ++k)
          a.classical_inputs.push_back(want_name(ci.items[k], "classical input"));
      }
      net.agents.push_back(std::move(a));

    } else if (head == "config") {
      if (saw_config) fail(Errc::ShapeError, "duplicate config form");
      saw_config = true;
      for (size_t k = 1; k < item.items.size(); ++k) {
        const SExpr& part = item.items[k];
        if (part.atom || part.items.empty() || !part.items[0].atom)
          fail(Errc::ShapeError, "config parts are (qubits ...) or (channels ...)");
        const std::string& ph = part.items[0].text;
        if (ph == "qubits") {
          for (size_t j = 1; j < part.items.size(); ++j) {
            const SExpr& pr = part.items[j];
            if (pr.atom || pr.items.size() != 2)
              fail(Errc::ShapeError, "qubit pairs are (r.RESOURCE-QUBIT AGENT.QUBIT)");
            auto [rp, rq] = split_dotted(want_atom(pr.items[0], "resource qubit"));
            if (rp != "r")
              fail(Errc::ShapeError, "resource side of a qubit pair must be r.NAME, got " +
                                         rp + "." + rq);
            auto [an, aq] = split_dotted(want_atom(pr.items[1], "agent qubit"));
            net.qubit_pairs.push_back({parse_qname(SExpr::make_atom(rq)), an,
                                       parse_qname(SExpr::make_atom(aq))});
          }
        } else if (ph == "channels") {
          for (size_t j = 1; j < part.items.size(); ++j) {
            const SExpr& pr = part.items[j];
            if (pr.atom || pr.items.size() != 2)
              fail(Errc::ShapeError, "channel pairs are (AGENT.CH AGENT.CH)");
            auto [a1, c1] = split_dotted(want_atom(pr.items[0], "channel endpoint"));
            auto [a2, c2] = split_dotted(want_atom(pr.items[1], "channel endpoint"));
            net.channel_pairs.push_back({a1, c1, a2, c2});
          }
        } else {
          fail(Errc::ShapeError, "unknown config part " + ph);
        }
      }
    } else {
      fail(Errc::ShapeError, "unknown defnetwork element " + head);
    }
  }
  if (!saw_resource) fail(Errc::ShapeError, "defnetwork is missing a resource form");

  Definitions::Entry entry;
  entry.kind = Definitions::Entry::Kind::NetworkDef_;
  entry.network = std::move(net);
  std::string name = entry.network.name;
  if (!defs.by_name.emplace(name, std::move(entry)).second)
    fail(Errc::BadName, "duplicate definition of " + name);
  defs.order.push_back(name);
}

}  // namespace

Definitions load_definitions(const std::string& text) {
  Definitions defs;
  for (const SExpr& form : parse_sexprs(text)) {
    if (form.atom || form.items.empty() || !form.items[0].atom)
      fail(Errc::ShapeError, "toplevel forms are (defpattern|defcompose|defnetwork ...)");
    const std::string& head = form.items[0].text;
    if (head == "defpattern")
      load_defpattern(defs, form);
    else if (head == "defcompose" || head == "compose")
      load_defcompose(defs, form);
    else if (head == "defnetwork")
      load_defnetwork(defs, form);
    else
      fail(Errc::UnknownOperator, "unknown toplevel form " + head);
  }
  return defs;
}

Definitions load_definitions_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_definitions(buf.str());
}

ResolvedTarget resolve_target(const Definitions* defs, const std::string& target) {
  std::string spec = target;
  bool builtin_only = false;
  if (spec.rfind("builtin:", 0) == 0) {
    builtin_only = true;
    spec = spec.substr(8);
  }

  if (spec.empty()) fail(Errc::UsageError, "empty target name");
  std::string name = spec;
  std::optional<std::string> arg;
  auto open = spec.find('(');
  if (open != std::string::npos) {
    if (spec.back() != ')')
      fail(Errc::UsageError, "malformed target " + target + " (expected NAME(ARG))");
    name = spec.substr(0, open);
    arg = spec.substr(open + 1, spec.size() - open - 2);
    if (arg->empty()) arg.reset();
  }

  ResolvedTarget r;
  r.name = name;

  if (!builtin_only && defs) {
    auto it = defs->by_name.find(name);
    if (it != defs->by_name.end()) {
      const Definitions::Entry& entry = it->second;
      switch (entry.kind) {
        case Definitions::Entry::Kind::PatternDef: {
          Pattern p = entry.pattern;
          if (arg) {
            std::vector<SExpr> args;
            std::istringstream ss(*arg);
            std::string piece;
            while (std::getline(ss, piece, ','))
              args.push_back(SExpr::make_atom(piece));
            p = apply_args(p, args);
          } else if (!p.params.empty()) {
            std::string names;
            for (const std::string& pn : p.params)
              names += (names.empty() ? "" : ",") + pn;
            fail(Errc::MissingParam,
                 name + " has parameters; call it as " + name + "(" + names + ")");
          }
          r.pattern = std::move(p);
          return r;
        }
        case Definitions::Entry::Kind::ComposeDef:
          if (arg) fail(Errc::UsageError, name + " takes no argument");
          r.pattern = entry.pattern;
          r.compose = entry.compose;
          return r;
        case Definitions::Entry::Kind::NetworkDef_:
          if (arg) fail(Errc::UsageError, name + " takes no argument");
          r.network = entry.network;
          return r;
      }
    }
  }

  if (is_builtin_name(name)) {
    BuiltinTarget t = make_builtin(name, arg);
    r.pattern = std::move(t.pattern);
    r.network = std::move(t.network);
    if (name == "CX") r.compose = cx_composition_shortcut();
    return r;
  }
  fail(Errc::UsageError, "unknown target " + target);
}

}  // namespace dmc
