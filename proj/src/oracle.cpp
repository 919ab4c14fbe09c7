#include "nesy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nesy::oracle {

namespace {

void check_cap(std::uint32_t n, std::uint32_t cap) {
  if (cap > 63) cap = 63;
  if (n > cap) throw error("enumeration over " + std::to_string(n) + " variables exceeds cap " + std::to_string(cap));
}

bool bit(std::uint64_t m, Var v) { return (m >> (v.index - 1)) & 1u; }

bool eval(const Formula& f, std::uint64_t m) {
  const auto& ch = f.children();
  switch (f.kind()) {
    case FormulaKind::constant: return f.value();
    case FormulaKind::literal: return bit(m, f.literal().var) == f.literal().positive;
    case FormulaKind::negation: return !eval(ch[0], m);
    case FormulaKind::conjunction:
      for (const auto& c : ch)
        if (!eval(c, m)) return false;
      return true;
    case FormulaKind::disjunction:
      for (const auto& c : ch)
        if (eval(c, m)) return true;
      return false;
    case FormulaKind::implication: return !eval(ch[0], m) || eval(ch[1], m);
    case FormulaKind::parity: {
      bool odd = false;
      for (const auto& c : ch) odd ^= eval(c, m);
      return odd;
    }
    case FormulaKind::exactly_one: {
      int hot = 0;
      for (const auto& c : ch) hot += eval(c, m);
      return hot == 1;
    }
  }
  return false;
}

// Value of every node under the assignment, children before parents.
std::vector<char> eval_nodes(const Circuit& c, std::uint64_t m) {
  std::vector<char> val(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: val[id] = 0; break;
      case NodeKind::constant_true: val[id] = 1; break;
      case NodeKind::literal: val[id] = bit(m, n.lit.var) == n.lit.positive; break;
      case NodeKind::and_gate:
        val[id] = 1;
        for (NodeId k : n.children) val[id] = val[id] && val[k];
        break;
      case NodeKind::or_gate:
        val[id] = 0;
        for (NodeId k : n.children) val[id] = val[id] || val[k];
        break;
    }
  }
  return val;
}

double model_weight(std::uint64_t m, std::uint32_t n, const LiteralWeights& w) {
  double x = 1;
  for (std::uint32_t v = 1; v <= n; ++v) x *= bit(m, Var{v}) ? w.positive(Var{v}) : w.negative(Var{v});
  return x;
}

}  // namespace

ModelSet enumerate_models(const Formula& f, std::uint32_t num_vars, std::uint32_t var_cap) {
  check_cap(num_vars, var_cap);
  ModelSet out{num_vars, {}};
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << num_vars); ++m)
    if (eval(f, m)) out.models.push_back(m);
  return out;
}

ModelSet enumerate_models(const CnfFormula& cnf, std::uint32_t var_cap) {
  check_cap(cnf.num_vars, var_cap);
  ModelSet out{cnf.num_vars, {}};
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << cnf.num_vars); ++m) {
    bool ok = true;
    for (const auto& cl : cnf.clauses) {
      bool sat = false;
      for (Literal l : cl) sat = sat || bit(m, l.var) == l.positive;
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) out.models.push_back(m);
  }
  return out;
}

ModelSet enumerate_models(const Circuit& c, std::uint32_t var_cap) {
  check_cap(c.num_vars(), var_cap);
  ModelSet out{c.num_vars(), {}};
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.num_vars()); ++m)
    if (eval_nodes(c, m)[c.root()]) out.models.push_back(m);
  return out;
}

ModelSet project(const ModelSet& m, std::uint32_t keep) {
  ModelSet out{keep, {}};
  std::uint64_t mask = keep >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << keep) - 1;
  for (auto x : m.models) out.models.push_back(x & mask);
  std::sort(out.models.begin(), out.models.end());
  out.models.erase(std::unique(out.models.begin(), out.models.end()), out.models.end());
  return out;
}

double brute_wmc(const ModelSet& m, const LiteralWeights& w) {
  double z = 0;
  for (auto x : m.models) z += model_weight(x, m.num_vars, w);
  return z;
}

double brute_entropy(const ModelSet& m, const LiteralWeights& w) {
  double z = brute_wmc(m, w);
  if (!(z > 0)) throw computation_error("model set has zero mass");
  double h = 0;
  for (auto x : m.models) {
    double q = model_weight(x, m.num_vars, w) / z;
    if (q > 0) h -= q * std::log(q);
  }
  return h;
}

std::vector<NodeId> check_determinism_exhaustive(const Circuit& c, std::uint32_t var_cap) {
  check_cap(c.num_vars(), var_cap);
  std::vector<NodeId> bad;
  std::vector<char> flagged(c.size(), 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.num_vars()); ++m) {
    auto val = eval_nodes(c, m);
    for (NodeId id = 0; id < c.size(); ++id) {
      auto n = c.node(id);
      if (n.kind != NodeKind::or_gate || flagged[id]) continue;
      int on = 0;
      for (NodeId k : n.children) on += val[k];
      if (on > 1) flagged[id] = 1;
    }
  }
  for (NodeId id = 0; id < c.size(); ++id)
    if (flagged[id]) bad.push_back(id);
  return bad;
}

std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& fn, std::span<const double> p,
                                double h) {
  if (!(h > 0)) throw error("finite difference step must be positive");
  std::vector<double> x(p.begin(), p.end()), g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double lo = std::max(0.0, p[i] - h), hi = std::min(1.0, p[i] + h);
    x[i] = hi;
    double fh = fn(x);
    x[i] = lo;
    double fl = fn(x);
    x[i] = p[i];
    g[i] = (fh - fl) / (hi - lo);
  }
  return g;
}

}  // namespace nesy::oracle
