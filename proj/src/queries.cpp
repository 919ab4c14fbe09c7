#include "nesy/queries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nesy {

// ---------------------------------------------------------------------------
// LiteralWeights

LiteralWeights LiteralWeights::from_probabilities(std::span<const double> p) {
  LiteralWeights w(static_cast<std::uint32_t>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) w.set_probability(Var{static_cast<std::uint32_t>(i + 1)}, p[i]);
  return w;
}

LiteralWeights LiteralWeights::uniform(std::uint32_t num_vars) {
  LiteralWeights w(num_vars);
  for (std::uint32_t v = 1; v <= num_vars; ++v) w.set(Var{v}, 0.5, 0.5);
  return w;
}

void LiteralWeights::set(Var v, double w_pos, double w_neg) {
  if (!v.valid() || v.index > num_vars()) throw error("weight for variable " + std::to_string(v.index) + " out of range");
  pos_[v.index] = w_pos;
  neg_[v.index] = w_neg;
  aux_[v.index] = 0;
}

void LiteralWeights::set_aux(Var v) {
  set(v, 1.0, 1.0);
  aux_[v.index] = 1;
}

bool LiteralWeights::probability_mode() const {
  for (std::uint32_t v = 1; v <= num_vars(); ++v) {
    if (aux_[v]) continue;
    if (std::abs(pos_[v] + neg_[v] - 1.0) > 1e-9) return false;
  }
  return true;
}

void LiteralWeights::validate() const {
  for (std::uint32_t v = 1; v <= num_vars(); ++v)
    for (double x : {pos_[v], neg_[v]})
      if (!std::isfinite(x) || x < 0)
        throw computation_error("invalid weight " + std::to_string(x) + " for variable " + std::to_string(v));
}

// ---------------------------------------------------------------------------
// Forward passes

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void require(const Circuit& c, const LiteralWeights& w, const char* op, bool need_smooth) {
  const auto& p = c.properties();
  if (!p.decomposable) throw computation_error(std::string(op) + " requires a decomposable circuit");
  if (!p.deterministic) throw computation_error(std::string(op) + " requires a deterministic circuit");
  if (need_smooth && !p.smooth) throw computation_error(std::string(op) + " requires a smooth circuit");
  if (w.num_vars() < c.num_vars())
    throw computation_error(std::string(op) + ": weights cover " + std::to_string(w.num_vars()) + " of " +
                            std::to_string(c.num_vars()) + " variables");
  w.validate();
}

std::vector<Var> root_gaps(const Circuit& c) {
  VarSet all(c.num_vars());
  for (std::uint32_t v = 1; v <= c.num_vars(); ++v) all.insert(Var{v});
  return all.minus(c.variables(c.root()));
}

std::vector<double> linear_values(const Circuit& c, const LiteralWeights& w) {
  std::vector<double> z(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: z[id] = 0; break;
      case NodeKind::constant_true: z[id] = 1; break;
      case NodeKind::literal: z[id] = w.weight(n.lit); break;
      case NodeKind::and_gate: {
        double acc = 1;
        for (NodeId ch : n.children) acc *= z[ch];
        z[id] = acc;
        break;
      }
      case NodeKind::or_gate: {
        double acc = 0;
        for (NodeId ch : n.children) acc += z[ch];
        z[id] = acc;
        break;
      }
    }
  }
  return z;
}

std::vector<double> log_values(const Circuit& c, const LiteralWeights& w) {
  std::vector<double> lz(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: lz[id] = neg_inf; break;
      case NodeKind::constant_true: lz[id] = 0; break;
      case NodeKind::literal: lz[id] = std::log(w.weight(n.lit)); break;
      case NodeKind::and_gate: {
        double acc = 0;
        for (NodeId ch : n.children) acc += lz[ch];
        lz[id] = acc;
        break;
      }
      case NodeKind::or_gate: {
        double m = neg_inf;
        for (NodeId ch : n.children) m = std::max(m, lz[ch]);
        if (m == neg_inf) {
          lz[id] = neg_inf;
          break;
        }
        double s = 0;
        for (NodeId ch : n.children) s += std::exp(lz[ch] - m);
        lz[id] = m + std::log(s);
        break;
      }
    }
  }
  return lz;
}

double binary_entropy(double q) {
  double h = 0;
  if (q > 0) h -= q * std::log(q);
  if (q < 1) h -= (1 - q) * std::log1p(-q);
  return h;
}

// Entropy per node given the node masses; `log_ratio(child, parent)` is ln q.
template <typename LogRatio>
std::vector<double> entropy_values(const Circuit& c, const std::vector<char>& alive, LogRatio log_ratio) {
  std::vector<double> h(c.size(), 0.0);
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    if (n.kind == NodeKind::and_gate) {
      double acc = 0;
      for (NodeId ch : n.children) acc += h[ch];
      h[id] = acc;
    } else if (n.kind == NodeKind::or_gate && alive[id]) {
      double acc = 0;
      for (NodeId ch : n.children) {
        if (!alive[ch]) continue;  // 0 ln 0 := 0
        double lq = log_ratio(ch, id);
        acc += std::exp(lq) * (h[ch] - lq);
      }
      h[id] = acc;
    }
  }
  return h;
}

}  // namespace

QueryValue wmc(const Circuit& c, const LiteralWeights& w, Space space) {
  require(c, w, "wmc", false);
  if (!c.properties().smooth && !w.probability_mode())
    throw computation_error("wmc with non-probability weights requires a smooth circuit");
  QueryValue out;
  out.space = space;
  auto gaps = root_gaps(c);
  if (space == Space::linear) {
    auto z = linear_values(c, w);
    double v = z[c.root()];
    for (Var g : gaps) v *= w.positive(g) + w.negative(g);
    out.value = v;
  } else {
    auto lz = log_values(c, w);
    double v = lz[c.root()];
    for (Var g : gaps) v += std::log(w.positive(g) + w.negative(g));
    out.value = v;
  }
  return out;
}

BigCount model_count(const Circuit& c) {
  const auto& p = c.properties();
  if (!p.decomposable || !p.deterministic || !p.smooth)
    throw computation_error("model_count requires a smooth, deterministic, decomposable circuit");
  std::vector<BigCount> n(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto node = c.node(id);
    switch (node.kind) {
      case NodeKind::constant_false: n[id] = 0; break;
      case NodeKind::constant_true:
      case NodeKind::literal: n[id] = 1; break;
      case NodeKind::and_gate:
        n[id] = 1;
        for (NodeId ch : node.children) n[id] *= n[ch];
        break;
      case NodeKind::or_gate:
        n[id] = 0;
        for (NodeId ch : node.children) n[id] += n[ch];
        break;
    }
  }
  BigCount result = n[c.root()];
  result <<= static_cast<unsigned>(root_gaps(c).size());
  return result;
}

QueryValue entropy(const Circuit& c, const LiteralWeights& w, const EntropyOptions& options) {
  require(c, w, "entropy", true);
  QueryValue out;
  out.space = options.space;  // of the per-node masses; the entropy is always in nats
  std::vector<double> mass;
  std::vector<char> alive(c.size());
  std::vector<double> h;
  bool root_mass_ok = false;
  if (options.space == Space::linear) {
    mass = linear_values(c, w);
    for (NodeId id = 0; id < c.size(); ++id) alive[id] = mass[id] > 0;
    h = entropy_values(c, alive, [&](NodeId ch, NodeId parent) { return std::log(mass[ch] / mass[parent]); });
    root_mass_ok = mass[c.root()] > 0;
  } else {
    mass = log_values(c, w);
    for (NodeId id = 0; id < c.size(); ++id) alive[id] = mass[id] > neg_inf;
    h = entropy_values(c, alive, [&](NodeId ch, NodeId parent) { return mass[ch] - mass[parent]; });
    root_mass_ok = mass[c.root()] > neg_inf;
  }
  auto gaps = root_gaps(c);
  for (Var g : gaps)
    if (w.positive(g) + w.negative(g) <= 0) root_mass_ok = false;
  if (!root_mass_ok) throw computation_error("constraint is unsatisfiable under the given weights (wmc = 0)");

  double total = h[c.root()];
  for (Var g : gaps) total += binary_entropy(w.positive(g) / (w.positive(g) + w.negative(g)));
  out.value = total;
  if (options.per_node) {
    out.per_node.resize(c.size());
    for (NodeId id = 0; id < c.size(); ++id) out.per_node[id] = {mass[id], h[id]};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradients

namespace {

void require_probability(const Circuit& c, const LiteralWeights& w, const char* op, bool need_smooth) {
  require(c, w, op, need_smooth);
  if (!w.probability_mode()) throw computation_error(std::string(op) + " requires probability-mode weights");
}

// z-adjoint propagation to children: OR passes through, AND multiplies by siblings.
void push_mass_adjoint(const NodeView& n, double adj, const std::vector<double>& z, std::vector<double>& zbar) {
  if (n.kind == NodeKind::or_gate) {
    for (NodeId ch : n.children) zbar[ch] += adj;
  } else if (n.kind == NodeKind::and_gate) {
    const std::size_t k = n.children.size();
    std::vector<double> prefix(k + 1, 1.0);
    for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * z[n.children[i]];
    double suffix = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      zbar[n.children[i]] += adj * prefix[i] * suffix;
      suffix *= z[n.children[i]];
    }
  }
}

std::vector<double> to_probability_gradient(const Circuit& c, const LiteralWeights& w, const std::vector<double>& zbar) {
  std::vector<double> grad(c.num_vars(), 0.0);
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    if (n.kind != NodeKind::literal || w.is_aux(n.lit.var)) continue;
    grad[n.lit.var.index - 1] += n.lit.positive ? zbar[id] : -zbar[id];
  }
  return grad;
}

}  // namespace

std::vector<double> wmc_gradient(const Circuit& c, const LiteralWeights& w) {
  require_probability(c, w, "wmc_gradient", false);
  auto z = linear_values(c, w);
  std::vector<double> zbar(c.size(), 0.0);
  zbar[c.root()] = 1.0;
  for (NodeId id = static_cast<NodeId>(c.size()); id-- > 0;) {
    if (zbar[id] == 0.0) continue;
    push_mass_adjoint(c.node(id), zbar[id], z, zbar);
  }
  return to_probability_gradient(c, w, zbar);
}

std::vector<double> entropy_gradient(const Circuit& c, const LiteralWeights& w) {
  require_probability(c, w, "entropy_gradient", true);
  auto z = linear_values(c, w);
  if (!(z[c.root()] > 0)) throw computation_error("constraint is unsatisfiable under the given weights (wmc = 0)");
  std::vector<char> alive(c.size());
  for (NodeId id = 0; id < c.size(); ++id) alive[id] = z[id] > 0;
  auto h = entropy_values(c, alive, [&](NodeId ch, NodeId parent) { return std::log(z[ch] / z[parent]); });

  std::vector<double> hbar(c.size(), 0.0), zbar(c.size(), 0.0);
  hbar[c.root()] = 1.0;
  for (NodeId id = static_cast<NodeId>(c.size()); id-- > 0;) {
    auto n = c.node(id);
    if (n.kind == NodeKind::and_gate) {
      for (NodeId ch : n.children) hbar[ch] += hbar[id];
    } else if (n.kind == NodeKind::or_gate && alive[id] && hbar[id] != 0.0) {
      // H = sum_j q_j (H_j - ln q_j), q_j = Z_j / Z:
      // dH/dH_j = q_j,  dH/dZ_j = (H_j - ln q_j - H) / Z
      for (NodeId ch : n.children) {
        double q = z[ch] / z[id];
        double lq = alive[ch] ? std::log(q) : 0.0;
        hbar[ch] += hbar[id] * q;
        zbar[ch] += hbar[id] * (h[ch] - lq - h[id]) / z[id];
      }
    }
    if (zbar[id] != 0.0) push_mass_adjoint(n, zbar[id], z, zbar);
  }

  auto grad = to_probability_gradient(c, w, zbar);
  // variables absent from the root are independent factors: d/dp H_b(p) = ln((1-p)/p)
  for (Var g : root_gaps(c)) {
    if (w.is_aux(g)) continue;
    double p = w.positive(g);
    grad[g.index - 1] += (p > 0 && p < 1) ? std::log((1 - p) / p) : 0.0;
  }
  return grad;
}

bool evaluate(const Circuit& c, const Assignment& a) {
  std::vector<char> val(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: val[id] = 0; break;
      case NodeKind::constant_true: val[id] = 1; break;
      case NodeKind::literal: val[id] = a.satisfies(n.lit); break;
      case NodeKind::and_gate:
        val[id] = std::all_of(n.children.begin(), n.children.end(), [&](NodeId ch) { return val[ch] != 0; });
        break;
      case NodeKind::or_gate:
        val[id] = std::any_of(n.children.begin(), n.children.end(), [&](NodeId ch) { return val[ch] != 0; });
        break;
    }
  }
  return val[c.root()] != 0;
}

// ---------------------------------------------------------------------------
// Weights file

LiteralWeights parse_weights(std::string_view text, std::uint32_t num_vars, const WeightsOptions& options) {
  LiteralWeights w(num_vars);
  std::vector<char> seen(num_vars + 1, 0);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2 && tok.size() != 3) throw parse_error("expected `<var> <p>` or `<var> <w_pos> <w_neg>`", lineno);
    auto number = [&](const std::string& s) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size()) throw parse_error("bad number `" + s + "`", lineno);
      return x;
    };
    double var = number(tok[0]);
    if (var < 1 || var > num_vars || var != std::floor(var))
      throw parse_error("variable " + tok[0] + " outside 1.." + std::to_string(num_vars), lineno);
    Var v{static_cast<std::uint32_t>(var)};
    if (seen[v.index]) throw parse_error("duplicate weight for variable " + tok[0], lineno);
    seen[v.index] = 1;
    double wp = number(tok[1]);
    double wn = tok.size() == 3 ? number(tok[2]) : 1.0 - wp;
    if (tok.size() == 2 && !(wp >= 0 && wp <= 1)) throw parse_error("probability " + tok[1] + " outside [0, 1]", lineno);
    if (!std::isfinite(wp) || !std::isfinite(wn) || wp < 0 || wn < 0) throw parse_error("weights must be finite and nonnegative", lineno);
    w.set(v, wp, wn);
  }
  for (Var a : options.aux)
    if (a.valid() && a.index <= num_vars && !seen[a.index]) {
      w.set_aux(a);
      seen[a.index] = 1;
    }
  for (std::uint32_t v = 1; v <= num_vars; ++v) {
    if (seen[v]) continue;
    if (!options.uniform_fill) throw parse_error("no weight for variable " + std::to_string(v));
    w.set(Var{v}, 0.5, 0.5);
  }
  return w;
}

}  // namespace nesy
