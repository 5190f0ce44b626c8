#include <algorithm>

#include "dmc/compose.hpp"
#include "dmc/error.hpp"
#include "dmc/interpreter.hpp"
#include "dmc/pattern.hpp"
#include "dmc/sexpr.hpp"
#include "test_util.hpp"

using namespace dmc;

namespace {
Pattern transfer() {  // single-qubit H-transfer pattern
  return parse_pattern_def(
      parse_sexpr("((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))"));
}

Pattern cz2() {  // two-qubit entangler, inputs = outputs
  return parse_pattern_def(parse_sexpr("((?a ?b) (?a ?b) (?a ?b) ((E ?a ?b)))"));
}

CompositionExpr chain(int n) {  // n transfer nodes in sequence
  CompositionExpr c;
  for (int i = 0; i < n; ++i) c.nodes.push_back({"n" + std::to_string(i + 1), transfer()});
  for (int i = 0; i + 1 < n; ++i)
    c.pairs.push_back({c.nodes[i].id, qn("?o"), c.nodes[i + 1].id, qn("?i")});
  return c;
}

bool mentions(const std::vector<std::string>& vs, const char* needle) {
  return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) {
    return v.find(needle) != std::string::npos;
  });
}

std::vector<cplx> run_one_branch_state(const Pattern& p, const InputMap& in) {
  FreshAlloc alloc;
  AssembledPattern a = assemble(p, alloc);
  InputMap concrete;
  size_t k = 0;
  for (const auto& [_, amp] : in) concrete[a.inputs.at(k++)] = amp;
  RunResult r = run_pattern(a, concrete, {});
  REQUIRE(!r.branches.empty());
  std::vector<cplx> first =
      dense_vector(r.branches[0].env.q, a.outputs);
  for (const Branch& b : r.branches) {
    auto v = dense_vector(b.env.q, a.outputs);
    REQUIRE(same_up_to_phase(v, first, 1e-9));
  }
  return first;
}
}  // namespace

TEST_CASE("binding rules: linked ends share one fresh canonical name") {
  CompositionExpr c = chain(2);
  auto bind = compute_bindings(c);
  // the single link claims ?c0; leftovers follow in topo order
  CHECK(bind.at(std::string("n1") + '\x1f' + "?o") == qn("?c0"));
  CHECK(bind.at(std::string("n2") + '\x1f' + "?i") == qn("?c0"));
  CHECK(bind.at(std::string("n1") + '\x1f' + "?i") == qn("?c1"));
  CHECK(bind.at(std::string("n2") + '\x1f' + "?o") == qn("?c2"));
}

TEST_CASE("a three-node chain shares two names across four") {
  Pattern p = compile_composition(chain(3));
  CHECK(p.space.size() == 4);  // 3 patterns x 2 qubits, 2 shared
  CHECK(p.inputs == std::vector<QName>{qn("?c2")});
  CHECK(p.outputs == std::vector<QName>{qn("?c3")});
  CHECK(p.commands.size() == 9);
  CHECK(validate_pattern(p).empty());
}

TEST_CASE("compilation is deterministic") {
  std::string once = print_sexpr(pattern_to_sexpr(compile_composition(chain(3))));
  std::string twice = print_sexpr(pattern_to_sexpr(compile_composition(chain(3))));
  CHECK(once == twice);
}

TEST_CASE("merge set arithmetic: I1 u (I2 \\ O1), (O1 \\ I2) u O2") {
  Pattern p1, p2;
  p1.inputs = {qn("?a")};
  p1.outputs = {qn("?b"), qn("?d")};
  p1.space = {qn("?a"), qn("?b"), qn("?d")};
  p1.commands = {cmd_e(qn("?a"), qn("?b"))};
  p2.inputs = {qn("?b"), qn("?c")};
  p2.outputs = {qn("?e")};
  p2.space = {qn("?b"), qn("?c"), qn("?e")};
  p2.commands = {cmd_e(qn("?c"), qn("?e"))};

  Pattern m = merge_patterns(p1, p2);
  CHECK(m.inputs == std::vector<QName>{qn("?a"), qn("?c")});
  CHECK(m.outputs == std::vector<QName>{qn("?d"), qn("?e")});
  CHECK(m.space ==
        std::vector<QName>{qn("?a"), qn("?b"), qn("?d"), qn("?c"), qn("?e")});
  REQUIRE(m.commands.size() == 2);  // concatenated in order
  CHECK(m.commands[0] == p1.commands[0]);
  CHECK(m.commands[1] == p2.commands[0]);
}

TEST_CASE("topological order breaks ties by declaration order") {
  CompositionExpr c;
  c.nodes.push_back({"x", transfer()});
  c.nodes.push_back({"y", transfer()});
  c.nodes.push_back({"z", transfer()});
  CHECK(topo_order(c) == std::vector<int>{0, 1, 2});

  c.pairs.push_back({"z", qn("?o"), "x", qn("?i")});
  CHECK(topo_order(c) == std::vector<int>{1, 2, 0});
}

TEST_CASE("cycles are detected") {
  CompositionExpr c = chain(2);
  c.pairs.push_back({"n2", qn("?o"), "n1", qn("?i")});
  CHECK(code_of([&] { topo_order(c); }) == Errc::CycleDetected);
  CHECK(mentions(validate_composition(c), "cycle"));
  CHECK(code_of([&] { compile_composition(c); }) == Errc::ValidationFailed);
}

TEST_CASE("validation rejects malformed compositions") {
  CompositionExpr dup = chain(1);
  dup.nodes.push_back({"n1", transfer()});
  CHECK(mentions(validate_composition(dup), "duplicate node id n1"));

  CompositionExpr ghost = chain(2);
  ghost.pairs.push_back({"n1", qn("?o"), "nope", qn("?i")});
  CHECK(mentions(validate_composition(ghost), "unknown node nope"));

  CompositionExpr wrongsrc = chain(2);
  wrongsrc.pairs[0].from_name = qn("?i");
  CHECK(mentions(validate_composition(wrongsrc), "is not an output of n1"));

  CompositionExpr wrongdst = chain(2);
  wrongdst.pairs[0].to_name = qn("?o");
  CHECK(mentions(validate_composition(wrongdst), "is not an input of n2"));

  CompositionExpr twice = chain(3);
  twice.pairs.push_back({"n1", qn("?o"), "n3", qn("?i")});
  auto v = validate_composition(twice);
  CHECK(mentions(v, "feeds more than one link"));

  CompositionExpr fedtwice = chain(3);
  fedtwice.pairs.push_back({"n3", qn("?o"), "n2", qn("?i")});
  CHECK(mentions(validate_composition(fedtwice), "fed by more than one link"));

  CompositionExpr self = chain(1);
  self.pairs.push_back({"n1", qn("?o"), "n1", qn("?i")});
  CHECK(mentions(validate_composition(self), "connects node n1 to itself"));

  CompositionExpr sym = chain(1);
  sym.nodes[0].pattern.params = {"theta"};
  sym.nodes[0].pattern.commands[1].angle = Angle{0, "theta"};
  CHECK(mentions(validate_composition(sym), "uninstantiated parameterized"));

  CompositionExpr broken = chain(1);
  broken.nodes[0].pattern.outputs = {qn("?zzz")};
  CHECK(mentions(validate_composition(broken), "node n1:"));
}

TEST_CASE("conflicting canonical names are an error") {
  // two disjoint links bind all four endpoints, a third would join them
  CompositionExpr c;
  Pattern two = cz2();
  c.nodes.push_back({"a", two});
  c.nodes.push_back({"b", two});
  c.pairs.push_back({"a", qn("?a"), "b", qn("?a")});
  c.pairs.push_back({"a", qn("?b"), "b", qn("?b")});
  c.pairs.push_back({"a", qn("?a"), "b", qn("?b")});
  CHECK(code_of([&] { compute_bindings(c); }) == Errc::ConflictingBinding);
}

TEST_CASE("sequencing two transfers is the identity channel") {
  Pattern p = seq_compose(transfer(), transfer());
  CHECK(validate_pattern(p).empty());
  Amp2 psi{cplx{0.6, 0}, cplx{0, 0.8}};
  auto v = run_one_branch_state(p, {{0, psi}});
  CHECK(same_up_to_phase(v, {psi[0], psi[1]}, 1e-9));
}

TEST_CASE("parallel composition keeps wires independent") {
  Pattern p = par_compose(transfer(), transfer());
  CHECK(p.inputs.size() == 2);
  CHECK(p.outputs.size() == 2);
  Amp2 zero{cplx{1, 0}, cplx{0, 0}};
  Amp2 one{cplx{0, 0}, cplx{1, 0}};
  auto v = run_one_branch_state(p, {{0, zero}, {1, one}});
  // H|0> (x) H|1> = |+-> with all entries +-1/2
  CHECK(same_up_to_phase(
      v, {cplx{0.5, 0}, cplx{-0.5, 0}, cplx{0.5, 0}, cplx{-0.5, 0}}, 1e-9));
}

TEST_CASE("sequential arity mismatches are rejected") {
  CHECK(code_of([] { seq_compose(transfer(), cz2()); }) == Errc::ArityMismatch);
}

TEST_CASE("compiling an empty composition fails") {
  CHECK(code_of([] { compile_composition({}); }) == Errc::ShapeError);
}

TEST_CASE("rename_variables touches signals and leaves strangers alone") {
  Pattern p = transfer();
  std::map<std::string, QName> m{{"?i", qn("?new")}};
  Pattern r = rename_variables(p, m);
  CHECK(r.inputs == std::vector<QName>{qn("?new")});
  CHECK(r.outputs == std::vector<QName>{qn("?o")});
  CHECK(r.commands[2].sig1->qubit == qn("?new"));
  CHECK(print_sexpr(pattern_to_sexpr(p)) !=
        print_sexpr(pattern_to_sexpr(r)));
}
