#include <algorithm>

#include "dmc/error.hpp"
#include "dmc/pattern.hpp"
#include "dmc/sexpr.hpp"
#include "test_util.hpp"

using namespace dmc;

namespace {
Pattern pat(const char* text) { return parse_pattern_def(parse_sexpr(text)); }

bool mentions(const std::vector<std::string>& vs, const char* needle) {
  return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) {
    return v.find(needle) != std::string::npos;
  });
}

// the corrected single-qubit transfer pattern
const char* kTransfer =
    "((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))";
}  // namespace

TEST_CASE("pattern definitions parse from (V I O COMMANDS)") {
  Pattern p = pat(kTransfer);
  CHECK(p.space == std::vector<QName>{qn("?i"), qn("?o")});
  CHECK(p.inputs == std::vector<QName>{qn("?i")});
  CHECK(p.outputs == std::vector<QName>{qn("?o")});
  REQUIRE(p.commands.size() == 3);
  CHECK(p.commands[1].op == Command::Op::Measure);
  CHECK(!p.distributed());

  CHECK(code_of([] { pat("((?i) (?i) (?i))"); }) == Errc::ShapeError);
  CHECK(code_of([] { pat("atom"); }) == Errc::ShapeError);
}

TEST_CASE("a structurally broken pattern still parses; validation reports it") {
  // swapped entangle/measure targets plus a premature signal read
  Pattern p = pat("((?i ?o) (?i) (?o) ((E ?o ?i) (M ?o 0) (X ?o (s ?i))))");
  auto v = validate_pattern(p);
  CHECK(v.size() >= 3);
  CHECK(mentions(v, "after its measurement"));       // X ?o follows M ?o
  CHECK(mentions(v, "before it is measured"));       // (s ?i) never measured
  CHECK(mentions(v, "output ?o is measured"));
  CHECK(mentions(v, "non-output ?i is never measured"));
}

TEST_CASE("the corrected transfer pattern validates cleanly") {
  CHECK(validate_pattern(pat(kTransfer)).empty());
}

TEST_CASE("validation catches each invariant separately") {
  auto violations = [](const char* text) {
    return validate_pattern(pat(text));
  };

  CHECK(mentions(violations("((?a ?a) () () ((M ?a 0)))"),
                 "duplicate name ?a in the computation space"));
  CHECK(mentions(violations("((?a) (?b) (?a) ())"),
                 "input ?b is not in the computation space"));
  CHECK(mentions(violations("((?a) () (?b) ((M ?a 0)))"),
                 "output ?b is not in the computation space"));
  CHECK(mentions(violations("((?a 1) () (?a 1) ())"),
                 "mixes concrete references and variables"));
  CHECK(mentions(violations("((?a) () (?a) ((E ?a ?a)))"),
                 "entangles a qubit with itself"));
  CHECK(mentions(violations("((?a) () (?a) ((X ?b)))"),
                 "references ?b, which is not in the computation space"));
  CHECK(mentions(violations("((?a ?b) () (?b) ((M ?a 0) (E ?a ?b)))"),
                 "after its measurement"));
  CHECK(mentions(violations("((?a ?b) () (?b) ((X ?b (s ?a)) (M ?a 0)))"),
                 "reads the outcome of ?a before it is measured"));
  CHECK(mentions(violations("((?a) () (?a) ((X ?a (s ?z))))"),
                 "reads an outcome of ?z, which is not in the computation space"));
  CHECK(mentions(violations("((?a ?b) () (?b) ((M ?a 0) (M ?a 0)))"),
                 "measures ?a again"));
  CHECK(mentions(violations("((?a) () (?a) ((M ?a 0)))"),
                 "output ?a is measured"));
  CHECK(mentions(violations("((?a ?b) () (?b) ())"),
                 "non-output ?a is never measured"));

  // communication ops parse only in distributed contexts...
  CHECK(code_of([] { pat("((?a) (?a) (?a) ((send c (s ?a))))"); }) ==
        Errc::DistributedOpInLocalContext);
  // ...and a pattern holding them is flagged by local validation
  CommandParseOptions dist;
  dist.allow_distributed = true;
  Pattern comm;
  comm.space = {qn("?a")};
  comm.inputs = {qn("?a")};
  comm.outputs = {qn("?a")};
  comm.commands =
      parse_command_sequence(parse_sexpr("((recv c v))"), dist);
  CHECK(mentions(validate_pattern(comm, false),
                 "is a communication command in a local pattern"));

  // undeclared symbolic angle
  Pattern sym = pat("((?a ?b) (?b) (?b) ((M ?a 0)))");
  sym.commands[0].angle = Angle{0, "theta"};
  CHECK(mentions(validate_pattern(sym), "undeclared angle parameter theta"));
  sym.params.push_back("theta");
  CHECK(validate_pattern(sym).empty());
}

TEST_CASE("distributed validation accepts communication when asked") {
  CommandParseOptions d;
  d.allow_distributed = true;
  Pattern p;
  p.space = {qn("?q")};
  p.inputs = {qn("?q")};
  p.commands = parse_command_sequence(
      parse_sexpr("((M ?q 0) (send c (s ?q)) (recv c2 v))"), d);
  CHECK(!validate_pattern(p, true).empty() == false);
  CHECK(p.distributed());
  CHECK(mentions(validate_pattern(p, false), "communication command"));
}

TEST_CASE("assembly allocates by first appearance") {
  FreshAlloc alloc;
  AssembledPattern a = assemble(pat(kTransfer), alloc);
  CHECK(a.space == std::vector<std::int64_t>{0, 1});
  CHECK(a.inputs == std::vector<std::int64_t>{0});
  CHECK(a.outputs == std::vector<std::int64_t>{1});
  CHECK(print_sexpr(command_sequence_to_sexpr(a.commands)) ==
        "((E 0 1) (M 0 0) (X 1 (s 0)))");
  REQUIRE(a.naming.size() == 2);
  CHECK(a.naming.at("?i") == 0);
  CHECK(a.naming.at("?o") == 1);
  CHECK(alloc.next == 2);

  // the allocator keeps counting across patterns
  AssembledPattern b = assemble(pat(kTransfer), alloc);
  CHECK(b.inputs == std::vector<std::int64_t>{2});
  CHECK(b.outputs == std::vector<std::int64_t>{3});
}

TEST_CASE("assembly of a concrete pattern is the identity") {
  Pattern p = pat("((0 1) (0) (1) ((E 0 1) (M 0 0) (X 1 (s 0))))");
  FreshAlloc alloc;
  AssembledPattern a = assemble(p, alloc);
  CHECK(a.space == std::vector<std::int64_t>{0, 1});
  CHECK(a.naming.empty());
  CHECK(print_sexpr(command_sequence_to_sexpr(a.commands)) ==
        "((E 0 1) (M 0 0) (X 1 (s 0)))");
  CHECK(alloc.next == 0);
}

TEST_CASE("assembly refuses to collide with concrete references") {
  Pattern p;
  p.space = {qn(0), qn("?x")};
  p.outputs = {qn(0), qn("?x")};
  FreshAlloc alloc;  // ?x would become 0, which is taken
  CHECK(code_of([&] { assemble(p, alloc); }) == Errc::NameCollision);
}

TEST_CASE("signals inside commands are renamed consistently") {
  Pattern p = pat(
      "((?a ?b ?c) (?a) (?c) "
      "((E ?a ?b) (E ?b ?c) (M ?a 0) (M ?b pi/2 (s ?a)) "
      "(X ?c (+ (s ?a) (s ?b)))))");
  FreshAlloc alloc;
  AssembledPattern a = assemble(p, alloc);
  CHECK(print_sexpr(command_sequence_to_sexpr(a.commands)) ==
        "((E 0 1) (E 1 2) (M 0 0) (M 1 1.5707963267948966 (s 0)) "
        "(X 2 (+ (s 0) (s 1))))");
}

TEST_CASE("instantiate_params substitutes every declared angle") {
  Pattern p = pat(kTransfer);
  p.params = {"theta"};
  p.commands[1].angle = Angle{0, "theta"};

  Pattern inst = instantiate_params(p, {{"theta", -1.0}});
  CHECK(inst.params.empty());
  CHECK(!inst.commands[1].angle.symbolic());
  CHECK(close(inst.commands[1].angle.value, 2 * 3.14159265358979323846 - 1.0));

  CHECK(code_of([&] { instantiate_params(p, {}); }) == Errc::MissingParam);
  CHECK(code_of([&] {
          instantiate_params(p, {{"theta", 0.0}, {"phi", 1.0}});
        }) == Errc::UnknownParam);
}

TEST_CASE("patterns round-trip through s-expressions") {
  const char* texts[] = {
      kTransfer,
      "((?a ?b) () (?a ?b) ((E ?a ?b)))",
      "(() () () ())",
      "((0 1 2) (0) (2) ((E 0 1) (E 1 2) (M 0 0) (M 1 0 (s 0)) "
      "(X 2 (s 1)) (Z 2 (s 0))))",
  };
  for (const char* t : texts) {
    Pattern p = pat(t);
    CHECK(print_sexpr(pattern_to_sexpr(p)) == t);
  }
}
