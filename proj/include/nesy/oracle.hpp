#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"
#include "nesy/queries.hpp"

namespace nesy::oracle {

/// Brute-force reference implementations. Nothing here reuses the circuit
/// query code; use them to cross-check it on small instances.

/// Models as bitmasks (bit i-1 = variable i), ascending.
struct ModelSet {
  std::uint32_t num_vars = 0;
  std::vector<std::uint64_t> models;
};

constexpr std::uint32_t default_var_cap = 20;

/// Throws error when num_vars exceeds `var_cap` (at most 63).
ModelSet enumerate_models(const Formula& f, std::uint32_t num_vars, std::uint32_t var_cap = default_var_cap);
ModelSet enumerate_models(const CnfFormula& cnf, std::uint32_t var_cap = default_var_cap);
ModelSet enumerate_models(const Circuit& c, std::uint32_t var_cap = default_var_cap);

/// Projects models onto variables 1..keep (drops auxiliary bits above).
ModelSet project(const ModelSet& m, std::uint32_t keep);

double brute_wmc(const ModelSet& m, const LiteralWeights& w);

/// Entropy in nats of the normalized model distribution. Throws
/// computation_error when the total mass is 0.
double brute_entropy(const ModelSet& m, const LiteralWeights& w);

/// Pairwise disjointness of every OR node's children, by enumeration over
/// the variables below the node. Returns the offending OR node ids.
std::vector<NodeId> check_determinism_exhaustive(const Circuit& c, std::uint32_t var_cap = 16);

/// Central differences of `fn` at `p`; one-sided where p_i +/- h leaves
/// [0, 1]. Throws error when h <= 0.
std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& fn, std::span<const double> p,
                                double h);

}  // namespace nesy::oracle
