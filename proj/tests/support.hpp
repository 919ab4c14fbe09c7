#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"
#include "nesy/oracle.hpp"
#include "nesy/queries.hpp"

namespace nesy::testing {

// Random k-CNF with distinct variables per clause and random signs.
inline CnfFormula random_cnf(std::mt19937& rng, std::uint32_t num_vars, std::uint32_t num_clauses, std::uint32_t max_len) {
  CnfFormula f;
  f.num_vars = num_vars;
  std::uniform_int_distribution<std::uint32_t> len(1, std::min(max_len, num_vars));
  std::uniform_int_distribution<std::uint32_t> var(1, num_vars);
  std::bernoulli_distribution sign(0.5);
  for (std::uint32_t i = 0; i < num_clauses; ++i) {
    Clause c;
    std::uint32_t k = len(rng);
    while (c.size() < k) {
      Var v{var(rng)};
      bool dup = false;
      for (Literal l : c) dup = dup || l.var == v;
      if (!dup) c.push_back({v, sign(rng)});
    }
    f.clauses.push_back(c);
  }
  return f;
}

// Satisfiable random CNF, by rejection against the enumeration oracle.
inline CnfFormula random_sat_cnf(std::mt19937& rng, std::uint32_t max_vars, std::uint32_t max_clauses) {
  std::uniform_int_distribution<std::uint32_t> nv((max_vars + 1) / 2, max_vars), nc(0, max_clauses);
  for (;;) {
    std::uint32_t n = nv(rng);
    CnfFormula f = random_cnf(rng, n, nc(rng), 4);
    if (!oracle::enumerate_models(f).models.empty()) return f;
  }
}

inline std::vector<double> random_probs(std::mt19937& rng, std::uint32_t n, double lo = 0.05, double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> p(n);
  for (double& x : p) x = u(rng);
  return p;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}


// (implies (and A B) C) with A=1, B=2, C=3.
inline CnfFormula implication_cnf() {
  CnfFormula f;
  f.num_vars = 3;
  f.clauses = {{neg(1), neg(2), pos(3)}};
  return f;
}

inline const std::vector<double>& implication_point() {
  static const std::vector<double> p{0.3, 0.5, 0.2};
  return p;
}

}  // namespace nesy::testing
