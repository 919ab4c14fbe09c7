#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nesy/compiler.hpp"
#include "nesy/constraints.hpp"
#include "nesy/oracle.hpp"
#include "nesy/queries.hpp"
#include "support.hpp"

using namespace nesy;
using testing::implication_cnf;
using testing::implication_point;
using testing::rel_err;

namespace {

Circuit implication_circuit_c_first() {
  CompileOptions o;
  o.var_order = VarOrder::dfs_fixed;
  o.fixed_order = {Var{3}, Var{1}, Var{2}};
  return compile(implication_cnf(), o);
}

bool has_value_near(const std::vector<NodeValues>& nodes, double want, double tol) {
  for (const auto& n : nodes)
    if (std::abs(n.entropy - want) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("implication example: wmc, entropy, per-node entropies") {
  auto w = LiteralWeights::from_probabilities(implication_point());
  Circuit c = compile(implication_cnf());
  CHECK(std::abs(wmc(c, w).value - 0.88) <= 1e-12);

  // Independent enumeration: 7 models, masses .03 .03 .12 .07 .28 .07 .28.
  auto models = oracle::enumerate_models(implication_cnf());
  double h_oracle = oracle::brute_entropy(models, w);
  CHECK(std::abs(entropy(c, w).value - h_oracle) <= 1e-12);
  CHECK(h_oracle == doctest::Approx(1.63351013055).epsilon(1e-10));

  Circuit cf = implication_circuit_c_first();
  auto q = entropy(cf, w, {Space::linear, true});
  REQUIRE(q.per_node.size() == cf.size());
  CHECK(q.per_node[cf.root()].entropy == doctest::Approx(h_oracle).epsilon(1e-12));
  for (double want : {0.61, 0.69, 1.30, 1.04}) CHECK(has_value_near(q.per_node, want, 5e-3));
}

TEST_CASE("wmc examples") {
  CircuitBuilder b(2);
  Circuit t = b.build(b.constant(true), DeterminismClaim::by_construction);
  auto w = LiteralWeights::from_probabilities(std::vector<double>{0.3, 0.9});
  CHECK(wmc(t, w).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wmc_gradient(t, w) == std::vector<double>{0.0, 0.0});

  Circuit e3 = exactly_one(3);
  auto p3 = LiteralWeights::from_probabilities(std::vector<double>{0.2, 0.3, 0.4});
  CHECK(wmc(e3, p3).value == doctest::Approx(0.452).epsilon(1e-14));
}

TEST_CASE("model counts") {
  CHECK(model_count(compile(parse_dimacs("p cnf 2 1\n1 2 0\n"))) == 3);
  CHECK(model_count(compile(total_order(4))) == 24);
  CHECK(model_count(grid_simple_paths({2, 2})) == 12);
  // Past 64 bits.
  CHECK(model_count(compile(parse_dimacs("p cnf 80 0\n"))) == BigCount(1) << 80);
}

TEST_CASE("entropy examples") {
  CircuitBuilder b(1);
  Circuit lit = b.build(b.literal(pos(1)), DeterminismClaim::by_construction);
  auto w = LiteralWeights::from_probabilities(std::vector<double>{0.4});
  CHECK(entropy(lit, w).value == 0.0);

  std::mt19937 rng(21);
  for (int it = 0; it < 30; ++it) {
    CnfFormula f = testing::random_sat_cnf(rng, 10, 20);
    Circuit c = compile(f);
    double count = static_cast<double>(model_count(c));
    CHECK(std::abs(entropy(c, LiteralWeights::uniform(f.num_vars)).value - std::log(count)) <= 1e-9);
  }
}

TEST_CASE("entropy equals enumeration on random instances") {
  std::mt19937 rng(8);
  for (int it = 0; it < 60; ++it) {
    CnfFormula f = testing::random_sat_cnf(rng, 12, 30);
    Circuit c = compile(f);
    auto w = LiteralWeights::from_probabilities(testing::random_probs(rng, f.num_vars, 0.01, 0.99));
    auto m = oracle::enumerate_models(f);
    CHECK(rel_err(wmc(c, w).value, oracle::brute_wmc(m, w)) <= 1e-9);
    CHECK(std::abs(entropy(c, w).value - oracle::brute_entropy(m, w)) <= 1e-9);
    auto lg = entropy(c, w, {Space::log, false});
    CHECK(std::abs(lg.value - oracle::brute_entropy(m, w)) <= 1e-9);
    CHECK(std::abs(wmc(c, w, Space::log).value - std::log(oracle::brute_wmc(m, w))) <= 1e-9);
  }
}

TEST_CASE("zero-probability literals") {
  // p_3 = 0 with the clause forcing 3 when 1 and 2 hold: that model has mass 0.
  Circuit c = compile(implication_cnf());
  std::vector<double> p{1.0, 1.0, 0.0};
  auto w = LiteralWeights::from_probabilities(p);
  CHECK(wmc(c, w).value == 0.0);
  CHECK_THROWS_AS(entropy(c, w), computation_error);

  std::vector<double> q{1.0, 0.5, 0.0};
  auto wq = LiteralWeights::from_probabilities(q);
  auto m = oracle::enumerate_models(implication_cnf());
  CHECK(wmc(c, wq).value == doctest::Approx(oracle::brute_wmc(m, wq)).epsilon(1e-15));
  CHECK(entropy(c, wq).value == doctest::Approx(oracle::brute_entropy(m, wq)).epsilon(1e-12));
  CHECK(entropy(c, wq, {Space::log, false}).value == doctest::Approx(std::log(1.0)).epsilon(1e-12));
}

TEST_CASE("wmc gradient") {
  Circuit c = compile(implication_cnf());
  auto w = LiteralWeights::from_probabilities(implication_point());
  auto g = wmc_gradient(c, w);
  REQUIRE(g.size() == 3);
  // wmc = 1 - pA pB (1 - pC)
  CHECK(g[0] == doctest::Approx(-0.5 * 0.8).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-0.3 * 0.8).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(0.15).epsilon(1e-12));

  auto fd = oracle::finite_diff(
      [&](std::span<const double> p) { return wmc(c, LiteralWeights::from_probabilities(p)).value; },
      implication_point(), 1e-5);
  for (int i = 0; i < 3; ++i) CHECK(rel_err(g[i], fd[i]) <= 1e-6);
}

TEST_CASE("entropy gradient") {
  CircuitBuilder b(1);
  Circuit taut = b.build(b.disjunction({b.literal(pos(1)), b.literal(neg(1))}, Var{1}), DeterminismClaim::by_construction);
  auto w = LiteralWeights::from_probabilities(std::vector<double>{0.3});
  CHECK(entropy(taut, w).value == doctest::Approx(-0.3 * std::log(0.3) - 0.7 * std::log(0.7)).epsilon(1e-14));
  CHECK(entropy_gradient(taut, w)[0] == doctest::Approx(std::log(0.7 / 0.3)).epsilon(1e-12));

  Circuit e2 = exactly_one(2);
  auto g = entropy_gradient(e2, LiteralWeights::uniform(2));
  CHECK(std::abs(g[0]) <= 1e-15);
  CHECK(std::abs(g[1]) <= 1e-15);

  // Variables absent from the circuit contribute their own binary entropy.
  Circuit free_var = compile(parse_dimacs("p cnf 2 1\n1 0\n"));
  auto w2 = LiteralWeights::from_probabilities(std::vector<double>{0.6, 0.2});
  CHECK(entropy(free_var, w2).value == doctest::Approx(-0.2 * std::log(0.2) - 0.8 * std::log(0.8)).epsilon(1e-13));
  CHECK(entropy_gradient(free_var, w2)[1] == doctest::Approx(std::log(0.8 / 0.2)).epsilon(1e-12));
}

TEST_CASE("gradients match finite differences on random instances") {
  std::mt19937 rng(17);
  for (int it = 0; it < 40; ++it) {
    CnfFormula f = testing::random_sat_cnf(rng, 10, 20);
    Circuit c = compile(f);
    auto p = testing::random_probs(rng, f.num_vars, 0.05, 0.95);
    auto w = LiteralWeights::from_probabilities(p);
    auto gw = wmc_gradient(c, w);
    auto gh = entropy_gradient(c, w);
    auto fw = oracle::finite_diff(
        [&](std::span<const double> x) { return wmc(c, LiteralWeights::from_probabilities(x)).value; }, p, 1e-5);
    auto fh = oracle::finite_diff(
        [&](std::span<const double> x) {
          return oracle::brute_entropy(oracle::enumerate_models(f), LiteralWeights::from_probabilities(x));
        },
        p, 1e-5);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK((std::abs(fw[i]) < 1e-3 ? std::abs(gw[i] - fw[i]) <= 1e-7 : rel_err(gw[i], fw[i]) <= 1e-6));
      CHECK((std::abs(fh[i]) < 1e-3 ? std::abs(gh[i] - fh[i]) <= 1e-7 : rel_err(gh[i], fh[i]) <= 1e-4));
    }
  }
}

TEST_CASE("log space survives underflow") {
  // 32 one-hot blocks of 4 with tiny probabilities: wmc ~ (4e-12)^32.
  const std::uint32_t blocks = 32, width = 4, n = blocks * width;
  CircuitBuilder b(n);
  std::vector<NodeId> parts;
  for (std::uint32_t k = 0; k < blocks; ++k) {
    std::vector<Var> vars;
    for (std::uint32_t j = 0; j < width; ++j) vars.push_back(Var{k * width + j + 1});
    parts.push_back(exactly_one(b, vars));
  }
  Circuit c = b.build(b.conjunction(parts), DeterminismClaim::by_construction);
  std::vector<double> p(n, 1e-12);
  auto w = LiteralWeights::from_probabilities(p);
  double block = std::log(4.0 * 1e-12) + 3.0 * std::log1p(-1e-12);
  CHECK(wmc(c, w).value == 0.0);
  CHECK(rel_err(wmc(c, w, Space::log).value, blocks * block) <= 1e-9);
  CHECK(std::abs(entropy(c, w, {Space::log, false}).value - blocks * std::log(4.0)) <= 1e-9);
}

TEST_CASE("precondition checks") {
  CircuitBuilder b(2);
  NodeId rhs = b.conjunction({b.literal(neg(1)), b.literal(pos(2))});
  Circuit unsmoothed = b.build(b.disjunction({b.literal(pos(1)), rhs}), DeterminismClaim::certify);
  CHECK_THROWS_AS(entropy(unsmoothed, LiteralWeights::uniform(2)), computation_error);
  LiteralWeights raw(2);
  raw.set(Var{1}, 2.0, 3.0);
  CHECK_THROWS_AS(wmc(unsmoothed, raw), computation_error);
  auto pw = LiteralWeights::from_probabilities(std::vector<double>{0.5, 0.25});
  CHECK(wmc(unsmoothed, pw).value == doctest::Approx(0.5 + 0.5 * 0.25).epsilon(1e-15));

  Circuit nondet = read_nnf("nnf 4 4 2\nL 1\nL 2\nO 0 2 0 1\nO 0 2 0 2\n");
  CHECK_THROWS_AS(wmc(nondet, pw), computation_error);
  CHECK_THROWS_AS(wmc_gradient(compile(implication_cnf()), raw), computation_error);

  LiteralWeights bad(1);
  bad.set(Var{1}, -1.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), computation_error);
}

TEST_CASE("non-probability weights") {
  Circuit c = compile(parse_dimacs("p cnf 2 1\n1 2 0\n"));
  LiteralWeights w(2);
  w.set(Var{1}, 2.0, 3.0);
  w.set(Var{2}, 5.0, 7.0);
  // models 10, 01, 11
  CHECK(wmc(c, w).value == doctest::Approx(2 * 7 + 3 * 5 + 2 * 5).epsilon(1e-15));
  auto m = oracle::enumerate_models(c);
  CHECK(entropy(c, w).value == doctest::Approx(oracle::brute_entropy(m, w)).epsilon(1e-13));
}

TEST_CASE("evaluate") {
  Circuit c = compile(implication_cnf());
  CHECK_FALSE(evaluate(c, Assignment::from_bits(3, 0b011)));
  CHECK(evaluate(c, Assignment::from_bits(3, 0b000)));
  CircuitBuilder b(1);
  Circuit f = b.build(b.constant(false), DeterminismClaim::by_construction);
  CHECK_FALSE(evaluate(f, Assignment::from_bits(1, 1)));
}

TEST_CASE("weights parser") {
  auto w = parse_weights("# probs\n1 0.3\n2 2 3\n", 2);
  CHECK(w.positive(Var{1}) == 0.3);
  CHECK(w.negative(Var{1}) == doctest::Approx(0.7));
  CHECK(w.negative(Var{2}) == 3.0);
  CHECK_FALSE(w.probability_mode());
  CHECK_THROWS_AS(parse_weights("1 0.3\n", 2), parse_error);
  CHECK(parse_weights("1 0.3\n", 2, {true, {}}).positive(Var{2}) == 0.5);
  auto aux = parse_weights("1 0.3\n", 2, {false, {Var{2}}});
  CHECK(aux.is_aux(Var{2}));
  CHECK(aux.probability_mode());
  CHECK_THROWS_AS(parse_weights("3 0.3\n", 2), parse_error);
  CHECK_THROWS_AS(parse_weights("1 1.5\n2 0.1\n", 2), parse_error);
  CHECK_THROWS_AS(parse_weights("1 0.5\n1 0.5\n", 1), parse_error);
  CHECK_THROWS_AS(parse_weights("1 x\n", 1), parse_error);
}
