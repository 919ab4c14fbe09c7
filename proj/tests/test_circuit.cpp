#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nesy/circuit.hpp"
#include "nesy/compiler.hpp"
#include "nesy/oracle.hpp"
#include "nesy/queries.hpp"
#include "support.hpp"

using namespace nesy;

TEST_CASE("hash-consing and binarization") {
  CircuitBuilder b(3);
  NodeId x = b.conjunction({b.literal(pos(1)), b.literal(pos(2))});
  NodeId y = b.conjunction({b.literal(pos(2)), b.literal(pos(1))});
  CHECK(x == y);
  CHECK(b.literal(pos(1)) == b.literal(pos(1)));

  NodeId three = b.conjunction({b.literal(pos(1)), b.literal(pos(2)), b.literal(pos(3))});
  Circuit c = b.build(three, DeterminismClaim::none);
  for (NodeId id = 0; id < c.size(); ++id)
    if (c.node(id).kind == NodeKind::and_gate) CHECK(c.node(id).children.size() == 2);
  CHECK(c.variables(c.root()).size() == 3);
  CHECK_THROWS_AS(b.disjunction(std::span<const NodeId>{}), error);
  CHECK_THROWS_AS(b.literal(pos(4)), error);
}

TEST_CASE("constant folding") {
  CircuitBuilder b(2);
  NodeId t = b.constant(true), f = b.constant(false), a = b.literal(pos(1));
  CHECK(b.conjunction({t, a}) == a);
  CHECK(b.conjunction({f, a}) == f);
  CHECK(b.conjunction(std::span<const NodeId>{}) == t);
  CHECK(b.disjunction({f, a}) == a);
  CHECK(b.disjunction({f, f}) == f);
  CHECK(b.decision(Var{2}, a, f) == b.conjunction({b.literal(pos(2)), a}));
}

TEST_CASE("variables") {
  CircuitBuilder b(3);
  Circuit lit = b.build(b.literal(pos(3)), DeterminismClaim::none);
  CHECK(lit.variables(lit.root()).to_vector() == std::vector<Var>{Var{3}});
  Circuit two = b.build(b.conjunction({b.literal(pos(1)), b.literal(neg(2))}), DeterminismClaim::none);
  CHECK(two.variables(two.root()).to_vector() == std::vector<Var>{Var{1}, Var{2}});
}

TEST_CASE("decomposability check") {
  CircuitBuilder b(2);
  Circuit ok = b.build(b.conjunction({b.literal(pos(1)), b.literal(pos(2))}), DeterminismClaim::none);
  CHECK(check_decomposable(ok).ok);
  CHECK(ok.properties().decomposable);
  Circuit bad = b.build(b.conjunction({b.literal(pos(1)), b.literal(neg(1))}), DeterminismClaim::none);
  auto r = check_decomposable(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.violations == std::vector<NodeId>{bad.root()});
  CHECK_FALSE(bad.properties().decomposable);
}

TEST_CASE("smoothness check and smoothing") {
  CircuitBuilder b(2);
  Circuit ok = b.build(b.disjunction({b.literal(pos(1)), b.literal(neg(1))}), DeterminismClaim::certify);
  CHECK(check_smooth(ok).ok);
  CHECK(ok.properties().deterministic);

  NodeId rhs = b.conjunction({b.literal(neg(1)), b.literal(pos(2))});
  Circuit bad = b.build(b.disjunction({b.literal(pos(1)), rhs}), DeterminismClaim::certify);
  auto r = check_smooth(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.violations == std::vector<NodeId>{bad.root()});
  CHECK(bad.properties().deterministic);
  CHECK_THROWS_AS(model_count(bad), computation_error);

  Circuit s = smooth(bad);
  CHECK(check_smooth(s).ok);
  CHECK(s.properties().deterministic);
  CHECK(model_count(s) == 3);
  CHECK(oracle::enumerate_models(s).models == oracle::enumerate_models(bad).models);
  CHECK(oracle::check_determinism_exhaustive(s).empty());

  // Smoothing an already smooth circuit keeps its size.
  Circuit again = smooth(s);
  CHECK(again.size() == s.size());
  CHECK(write_nnf(again) == write_nnf(s));
}

TEST_CASE("NNF read and write") {
  const char* text = "nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n";
  Circuit c = read_nnf(text);
  CHECK(c.size() == 3);
  CHECK(c.node(c.root()).kind == NodeKind::and_gate);
  CHECK(write_nnf(c) == text);

  Circuit f = read_nnf("nnf 1 0 2\nO 0 0\n");
  CHECK(f.node(f.root()).kind == NodeKind::constant_false);
  Circuit t = read_nnf("nnf 1 0 0\nA 0\n");
  CHECK(t.node(t.root()).kind == NodeKind::constant_true);

  CHECK_THROWS_AS(read_nnf("nnf 2 1 1\nA 1 1\nL 1\n"), parse_error);
  CHECK_THROWS_AS(read_nnf("nnf 2 1 1\nL 1\nA 2 0\n"), parse_error);
  CHECK_THROWS_AS(read_nnf("nnf 1 0 1\nL 2\n"), parse_error);
  CHECK_THROWS_AS(read_nnf("nnf 3 2 1\nL 1\nL -1\n"), parse_error);
  try {
    read_nnf("nnf 3 2 2\nL 1\nL 2\nX 2 0 1\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("compiled circuit round-trips through NNF") {
  Circuit c = compile(testing::implication_cnf());
  Circuit r = read_nnf(write_nnf(c));
  CHECK(write_nnf(r) == write_nnf(c));
  CHECK(r.properties().decomposable);
  CHECK(r.properties().smooth);
  CHECK(r.properties().deterministic);  // certified on load
  auto w = LiteralWeights::from_probabilities(testing::implication_point());
  CHECK(wmc(r, w).value == doctest::Approx(wmc(c, w).value).epsilon(1e-15));
  CHECK(entropy(r, w).value == doctest::Approx(entropy(c, w).value).epsilon(1e-15));
  CHECK(r.variables(r.root()).size() == 3);
  CHECK(check_decomposable(r).ok);
}

TEST_CASE("determinism certificate is conservative") {
  // or(+1, or(+1, +2)) overlaps at 1 = true.
  Circuit c = read_nnf("nnf 4 4 2\nL 1\nL 2\nO 0 2 0 1\nO 0 2 0 2\n");
  CHECK_FALSE(c.properties().deterministic);
  CHECK_FALSE(certify_determinism(c).ok);
  CHECK_FALSE(oracle::check_determinism_exhaustive(c).empty());

  // A decision on variable 1 is certified.
  Circuit d = read_nnf("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n");
  CHECK(d.properties().deterministic);
  CHECK(check_topological(d));
}
