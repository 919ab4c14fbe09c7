#include "nesy/losses.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nesy/text.hpp"

namespace nesy {

namespace {

LiteralWeights row_weights(const Circuit& c, std::span<const double> p, std::span<const Var> aux) {
  if (p.size() != c.num_vars())
    throw computation_error("probability vector has " + std::to_string(p.size()) + " entries, circuit has " +
                            std::to_string(c.num_vars()) + " variables");
  for (double x : p)
    if (!(x >= 0 && x <= 1)) throw computation_error("probability " + format_real(x) + " outside [0, 1]");
  LiteralWeights w = LiteralWeights::from_probabilities(p);
  for (Var v : aux) w.set_aux(v);
  return w;
}

}  // namespace

LossBundle semantic_loss(const Circuit& c, const LiteralWeights& w) {
  double z = wmc(c, w).value;
  if (!(z > 0))
    throw computation_error("constraint has probability 0 under the prediction (semantic loss is infinite)");
  LossBundle out{-std::log(z), wmc_gradient(c, w)};
  for (double& g : out.grad) g = -g / z;
  return out;
}

LossBundle semantic_loss(const Circuit& c, std::span<const double> p) { return semantic_loss(c, row_weights(c, p, {})); }

LossBundle nesy_entropy(const Circuit& c, const LiteralWeights& w) {
  return {entropy(c, w).value, entropy_gradient(c, w)};
}

LossBundle nesy_entropy(const Circuit& c, std::span<const double> p) { return nesy_entropy(c, row_weights(c, p, {})); }

LossBundle full_entropy(std::span<const double> p) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  LossBundle out{0.0, std::vector<double>(p.size(), 0.0)};
  for (std::size_t i = 0; i < p.size(); ++i) {
    double q = p[i];
    if (!(q >= 0 && q <= 1)) throw computation_error("probability " + format_real(q) + " outside [0, 1]");
    if (q > 0) out.value -= q * std::log(q);
    if (q < 1) out.value -= (1 - q) * std::log1p(-q);
    double qc = std::min(std::max(q, eps), 1 - eps);
    out.grad[i] = std::log((1 - qc) / qc);
  }
  return out;
}

std::vector<RowResult> combined_objective(const Circuit& c, std::span<const double> probs, std::size_t rows,
                                          const ObjectiveConfig& cfg, std::span<const Var> aux) {
  if (!std::isfinite(cfg.w_semantic) || !std::isfinite(cfg.w_entropy) || cfg.w_semantic < 0 || cfg.w_entropy < 0)
    throw error("loss coefficients must be finite and nonnegative");
  const std::size_t n = c.num_vars();
  if (probs.size() != rows * n)
    throw error("batch holds " + std::to_string(probs.size()) + " values, expected " + std::to_string(rows) + " x " +
                std::to_string(n));

  std::vector<RowResult> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto p = probs.subspan(r * n, n);
    try {
      LiteralWeights w = row_weights(c, p, aux);
      LossBundle sem = semantic_loss(c, w);
      LossBundle ent;
      if (cfg.entropy_kind == EntropyKind::nesy) {
        ent = nesy_entropy(c, w);
      } else {
        std::vector<double> keep(p.begin(), p.end());
        for (Var v : aux) keep[v.index - 1] = 1.0;  // deterministic: no entropy, zero gradient below
        ent = full_entropy(keep);
        for (Var v : aux) ent.grad[v.index - 1] = 0.0;
      }
      LossBundle total{cfg.w_semantic * sem.value + cfg.w_entropy * ent.value, std::vector<double>(n)};
      for (std::size_t i = 0; i < n; ++i) total.grad[i] = cfg.w_semantic * sem.grad[i] + cfg.w_entropy * ent.grad[i];
      out[r].bundle = std::move(total);
    } catch (const computation_error& e) {
      out[r].error = e.what();
    }
  }
  return out;
}

Batch parse_batch(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  Batch b;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!header) {
      long long rows = -1, cols = -1;
      try {
        if (tok.size() == 3 && tok[0] == "batch") {
          rows = std::stoll(tok[1]);
          cols = std::stoll(tok[2]);
        }
      } catch (const std::exception&) {
      }
      if (rows < 0 || cols < 0) throw parse_error("expected header `batch <B> <n>`", lineno);
      b.rows = static_cast<std::size_t>(rows);
      b.cols = static_cast<std::size_t>(cols);
      header = true;
      continue;
    }
    if (tok.size() != b.cols) throw parse_error("expected " + std::to_string(b.cols) + " values, found " + std::to_string(tok.size()), lineno);
    if (b.values.size() / std::max<std::size_t>(b.cols, 1) >= b.rows) throw parse_error("more rows than declared", lineno);
    for (const auto& t : tok) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != t.size()) throw parse_error("bad number `" + t + "`", lineno);
      b.values.push_back(x);
    }
  }
  if (!header) throw parse_error("missing `batch <B> <n>` header");
  if (b.values.size() != b.rows * b.cols)
    throw parse_error("header declares " + std::to_string(b.rows) + " rows, found " +
                      std::to_string(b.cols ? b.values.size() / b.cols : 0));
  return b;
}

std::string format_row(std::size_t row, const RowResult& r) {
  std::string out = "row=" + std::to_string(row);
  if (!r.valid()) return out + " error=" + r.error;
  return out + " loss=" + format_real(r.bundle->value) + " grad=" + join_reals(r.bundle->grad);
}

}  // namespace nesy
