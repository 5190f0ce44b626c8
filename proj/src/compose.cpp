#include "dmc/compose.hpp"

#include <algorithm>
#include <set>

#include "dmc/error.hpp"

namespace dmc {

namespace {
constexpr char kSep = '\x1f';

std::string key_of(const std::string& node, const QName& name) {
  return node + kSep + qname_str(name);
}

bool contains(const std::vector<QName>& xs, const QName& q) {
  return std::find(xs.begin(), xs.end(), q) != xs.end();
}

int node_index(const CompositionExpr& c, const std::string& id) {
  for (size_t i = 0; i < c.nodes.size(); ++i)
    if (c.nodes[i].id == id) return static_cast<int>(i);
  return -1;
}
}  // namespace

std::vector<std::string> validate_composition(const CompositionExpr& c) {
  std::vector<std::string> out;
  std::set<std::string> ids;
  for (const NodeInst& n : c.nodes) {
    if (n.id.empty()) out.push_back("a node has an empty id");
    if (!ids.insert(n.id).second)
      out.push_back("duplicate node id " + n.id);
    if (!n.pattern.params.empty())
      out.push_back("node " + n.id + " uses an uninstantiated parameterized pattern");
    for (const std::string& v : validate_pattern(n.pattern))
      out.push_back("node " + n.id + ": " + v);
  }

  std::set<std::string> fed, feeding;
  for (const LinkPair& l : c.pairs) {
    int fi = node_index(c, l.from_node);
    int ti = node_index(c, l.to_node);
    if (fi < 0) {
      out.push_back("link references unknown node " + l.from_node);
      continue;
    }
    if (ti < 0) {
      out.push_back("link references unknown node " + l.to_node);
      continue;
    }
    if (!contains(c.nodes[fi].pattern.outputs, l.from_name))
      out.push_back("link source " + l.from_node + "." + qname_str(l.from_name) +
                    " is not an output of " + l.from_node);
    if (!contains(c.nodes[ti].pattern.inputs, l.to_name))
      out.push_back("link target " + l.to_node + "." + qname_str(l.to_name) +
                    " is not an input of " + l.to_node);
    if (!feeding.insert(key_of(l.from_node, l.from_name)).second)
      out.push_back("output " + l.from_node + "." + qname_str(l.from_name) +
                    " feeds more than one link");
    if (!fed.insert(key_of(l.to_node, l.to_name)).second)
      out.push_back("input " + l.to_node + "." + qname_str(l.to_name) +
                    " is fed by more than one link");
    if (fi == ti)
      out.push_back("link connects node " + l.from_node + " to itself");
  }

  if (out.empty()) {
    try {
      topo_order(c);
    } catch (const Error& e) {
      out.push_back(e.what());
    }
  }
  return out;
}

std::vector<int> topo_order(const CompositionExpr& c) {
  size_t n = c.nodes.size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (const LinkPair& l : c.pairs) {
    int fi = node_index(c, l.from_node);
    int ti = node_index(c, l.to_node);
    if (fi < 0 || ti < 0)
      fail(Errc::PairMismatch, "link references an unknown node");
    succ[fi].push_back(ti);
    ++indeg[ti];
  }
  std::vector<int> order;
  std::vector<bool> done(n, false);
  for (size_t step = 0; step < n; ++step) {
    int pick = -1;
    for (size_t i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) {
        pick = static_cast<int>(i);
        break;
      }
    if (pick < 0) fail(Errc::CycleDetected, "composition links form a cycle");
    done[pick] = true;
    order.push_back(pick);
    for (int t : succ[pick]) --indeg[t];
  }
  return order;
}

std::map<std::string, QName> compute_bindings(const CompositionExpr& c) {
  std::vector<int> order = topo_order(c);
  std::vector<int> topo_pos(c.nodes.size());
  for (size_t i = 0; i < order.size(); ++i) topo_pos[order[i]] = static_cast<int>(i);

  // edges in topological order of their source, declaration order on ties
  std::vector<const LinkPair*> edges;
  for (const LinkPair& l : c.pairs) edges.push_back(&l);
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const LinkPair* a, const LinkPair* b) {
                     return topo_pos[node_index(c, a->from_node)] <
                            topo_pos[node_index(c, b->from_node)];
                   });

  std::map<std::string, QName> bind;
  int counter = 0;
  auto fresh = [&counter]() { return QName{"?c" + std::to_string(counter++)}; };

  for (const LinkPair* l : edges) {
    std::string kf = key_of(l->from_node, l->from_name);
    std::string kt = key_of(l->to_node, l->to_name);
    bool bf = bind.count(kf), bt = bind.count(kt);
    if (!bf && !bt) {
      QName q = fresh();
      bind[kf] = q;
      bind[kt] = q;
    } else if (bf && !bt) {
      bind[kt] = bind[kf];
    } else if (!bf && bt) {
      bind[kf] = bind[kt];
    } else if (!(bind[kf] == bind[kt])) {
      fail(Errc::ConflictingBinding,
           "link endpoints " + kf + " and " + kt +
               " already carry different canonical names");
    }
  }

  // every remaining name gets its own canonical name, nodes in topo order
  for (int ni : order) {
    const NodeInst& n = c.nodes[ni];
    auto visit = [&](const QName& q) {
      std::string k = key_of(n.id, q);
      if (!bind.count(k)) bind[k] = fresh();
    };
    for (const QName& q : n.pattern.space) visit(q);
    for (const QName& q : n.pattern.inputs) visit(q);
    for (const QName& q : n.pattern.outputs) visit(q);
  }
  return bind;
}

namespace {
void rename_signal(SignalExpr& s, const std::map<std::string, QName>& m) {
  if (s.kind == SignalExpr::Kind::Outcome) {
    auto it = m.find(qname_str(s.qubit));
    if (it != m.end()) s.qubit = it->second;
  }
  if (s.kind == SignalExpr::Kind::Sum)
    for (SignalExpr& t : s.terms) rename_signal(t, m);
}
}  // namespace

Pattern rename_variables(const Pattern& p,
                         const std::map<std::string, QName>& mapping) {
  Pattern out = p;
  auto ren = [&](QName& q) {
    auto it = mapping.find(qname_str(q));
    if (it != mapping.end()) q = it->second;
  };
  for (QName& q : out.space) ren(q);
  for (QName& q : out.inputs) ren(q);
  for (QName& q : out.outputs) ren(q);
  for (Command& c : out.commands) {
    ren(c.q1);
    if (c.op == Command::Op::Entangle) ren(c.q2);
    if (c.sig1) rename_signal(*c.sig1, mapping);
    if (c.sig2) rename_signal(*c.sig2, mapping);
  }
  return out;
}

Pattern merge_patterns(const Pattern& p1, const Pattern& p2) {
  Pattern out;
  out.name = p1.name.empty() || p2.name.empty() ? p1.name + p2.name
                                                : p1.name + "+" + p2.name;
  out.space = p1.space;
  for (const QName& q : p2.space)
    if (!contains(out.space, q)) out.space.push_back(q);

  out.inputs = p1.inputs;
  for (const QName& q : p2.inputs)
    if (!contains(p1.outputs, q) && !contains(out.inputs, q))
      out.inputs.push_back(q);

  for (const QName& q : p1.outputs)
    if (!contains(p2.inputs, q)) out.outputs.push_back(q);
  for (const QName& q : p2.outputs)
    if (!contains(out.outputs, q)) out.outputs.push_back(q);

  out.commands = p1.commands;
  out.commands.insert(out.commands.end(), p2.commands.begin(),
                      p2.commands.end());

  out.params = p1.params;
  for (const std::string& s : p2.params)
    if (std::find(out.params.begin(), out.params.end(), s) == out.params.end())
      out.params.push_back(s);
  return out;
}

Pattern compile_composition(const CompositionExpr& c) {
  if (c.nodes.empty())
    fail(Errc::ShapeError, "composition has no nodes");
  std::vector<std::string> violations = validate_composition(c);
  if (!violations.empty()) {
    std::string msg = "composition is invalid:";
    for (const std::string& v : violations) msg += "\n  " + v;
    fail(Errc::ValidationFailed, msg);
  }

  std::vector<int> order = topo_order(c);
  std::map<std::string, QName> bind = compute_bindings(c);

  auto renamed = [&](int ni) {
    const NodeInst& n = c.nodes[ni];
    std::map<std::string, QName> local;
    auto put = [&](const QName& q) {
      local[qname_str(q)] = bind.at(key_of(n.id, q));
    };
    for (const QName& q : n.pattern.space) put(q);
    for (const QName& q : n.pattern.inputs) put(q);
    for (const QName& q : n.pattern.outputs) put(q);
    return rename_variables(n.pattern, local);
  };

  Pattern result = renamed(order[0]);
  for (size_t k = 1; k < order.size(); ++k)
    result = merge_patterns(result, renamed(order[k]));
  return result;
}

Pattern seq_compose(const Pattern& p1, const Pattern& p2) {
  if (p1.outputs.size() != p2.inputs.size())
    fail(Errc::ArityMismatch,
         "sequential composition needs |outputs| = |inputs|, got " +
             std::to_string(p1.outputs.size()) + " and " +
             std::to_string(p2.inputs.size()));
  CompositionExpr c;
  c.nodes.push_back({"a", p1});
  c.nodes.push_back({"b", p2});
  for (size_t i = 0; i < p1.outputs.size(); ++i)
    c.pairs.push_back({"a", p1.outputs[i], "b", p2.inputs[i]});
  return compile_composition(c);
}

Pattern par_compose(const Pattern& p1, const Pattern& p2) {
  CompositionExpr c;
  c.nodes.push_back({"a", p1});
  c.nodes.push_back({"b", p2});
  return compile_composition(c);
}

}  // namespace dmc
