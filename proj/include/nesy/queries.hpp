#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"

namespace nesy {

/// Per-variable literal weights. In probability mode w_pos = p_i and
/// w_neg = 1 - p_i for every non-auxiliary variable; auxiliary variables
/// carry the neutral pair (1, 1).
class LiteralWeights {
public:
  LiteralWeights() = default;
  /// All variables start at the neutral pair (1, 1).
  explicit LiteralWeights(std::uint32_t num_vars) : pos_(num_vars + 1, 1.0), neg_(num_vars + 1, 1.0), aux_(num_vars + 1, 0) {}

  /// p[i] is the probability of variable i+1.
  static LiteralWeights from_probabilities(std::span<const double> p);
  static LiteralWeights uniform(std::uint32_t num_vars);

  std::uint32_t num_vars() const noexcept { return pos_.empty() ? 0 : static_cast<std::uint32_t>(pos_.size() - 1); }

  void set(Var v, double w_pos, double w_neg);
  void set_probability(Var v, double p) { set(v, p, 1.0 - p); }
  void set_aux(Var v);

  double positive(Var v) const { return pos_.at(v.index); }
  double negative(Var v) const { return neg_.at(v.index); }
  double weight(Literal l) const { return l.positive ? pos_[l.var.index] : neg_[l.var.index]; }
  bool is_aux(Var v) const { return aux_.at(v.index) != 0; }

  bool probability_mode() const;
  /// Throws computation_error on a NaN, infinite or negative weight.
  void validate() const;

private:
  std::vector<double> pos_, neg_;
  std::vector<char> aux_;
};

enum class Space { linear, log };

struct NodeValues {
  double wmc = 0;      // linear, or ln(wmc) in log space
  double entropy = 0;  // nats
};

struct QueryValue {
  double value = 0;
  Space space = Space::linear;
  std::vector<NodeValues> per_node;  // filled on request, indexed by node id
};

using BigCount = boost::multiprecision::cpp_int;

/// Weighted model count over variables 1..num_vars. Log space returns ln(wmc).
QueryValue wmc(const Circuit& c, const LiteralWeights& w, Space space = Space::linear);

/// Exact number of models over variables 1..num_vars.
BigCount model_count(const Circuit& c);

struct EntropyOptions {
  Space space = Space::linear;
  bool per_node = false;
};

/// Entropy, in nats, of the weight-induced distribution conditioned on the
/// circuit. Requires a smooth, deterministic, decomposable circuit.
QueryValue entropy(const Circuit& c, const LiteralWeights& w, const EntropyOptions& options = {});

/// d wmc / d p_i, indexed by variable - 1. Probability mode only.
std::vector<double> wmc_gradient(const Circuit& c, const LiteralWeights& w);

/// d entropy / d p_i, indexed by variable - 1. Probability mode only.
/// Children of zero mass contribute nothing through their -q ln q term.
std::vector<double> entropy_gradient(const Circuit& c, const LiteralWeights& w);

bool evaluate(const Circuit& c, const Assignment& a);

struct WeightsOptions {
  bool uniform_fill = false;  // missing variables become (0.5, 0.5)
  std::vector<Var> aux;       // missing auxiliary variables become (1, 1)
};

/// Lines `<var> <w_pos> <w_neg>` or `<var> <p>`; `#` starts a comment.
LiteralWeights parse_weights(std::string_view text, std::uint32_t num_vars, const WeightsOptions& options = {});

}  // namespace nesy
