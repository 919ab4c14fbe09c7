#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/queries.hpp"

namespace nesy {

/// Loss value in nats and its gradient with respect to p (index = var - 1).
struct LossBundle {
  double value = 0;
  std::vector<double> grad;
};

enum class EntropyKind { nesy, full };

/// Loss coefficients. The defaults carry no meaning beyond being small and
/// positive; callers are expected to tune them.
struct ObjectiveConfig {
  double w_semantic = 1.0;
  double w_entropy = 0.1;
  EntropyKind entropy_kind = EntropyKind::nesy;
};

/// -ln Pr(constraint). Throws computation_error when the probability is 0.
LossBundle semantic_loss(const Circuit& c, const LiteralWeights& w);
LossBundle semantic_loss(const Circuit& c, std::span<const double> p);

/// Entropy of the distribution restricted to the constraint's models.
LossBundle nesy_entropy(const Circuit& c, const LiteralWeights& w);
LossBundle nesy_entropy(const Circuit& c, std::span<const double> p);

/// Entropy of the unrestricted factorized distribution, sum of binary
/// entropies. Gradients at p in {0, 1} are evaluated at the nearest
/// representable interior point so they stay finite.
LossBundle full_entropy(std::span<const double> p);

/// Per-row outcome of a batched objective; `error` is set when invalid.
struct RowResult {
  std::optional<LossBundle> bundle;
  std::string error;

  bool valid() const noexcept { return bundle.has_value(); }
};

/// Rows of `probs` (row-major, `rows` x c.num_vars()) are evaluated
/// independently; a row whose constraint probability is 0 is reported, not
/// thrown. Variables listed in `aux` take neutral weights and are skipped by
/// the full-entropy term.
std::vector<RowResult> combined_objective(const Circuit& c, std::span<const double> probs, std::size_t rows,
                                          const ObjectiveConfig& cfg, std::span<const Var> aux = {});

/// `batch <B> <n>` followed by B lines of n probabilities.
struct Batch {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

Batch parse_batch(std::string_view text);

/// `row=<i> loss=<v> grad=<g1,...,gn>` or `row=<i> error=<message>`.
std::string format_row(std::size_t row, const RowResult& r);

}  // namespace nesy
