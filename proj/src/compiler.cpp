#include "nesy/compiler.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace nesy {

std::string CompileStats::summary() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "nodes=%zu edges=%zu cache_hits=%zu time_ms=%.12g", nodes, edges, cache_hits, time_ms);
  return buf;
}

// ---------------------------------------------------------------------------
// SearchState

SearchState::SearchState(const CnfFormula& cnf) : cnf_(&cnf), values_(cnf.num_vars + 1, -1) {}

bool SearchState::clause_satisfied(std::uint32_t clause) const {
  for (Literal l : cnf_->clauses[clause])
    if (is_true(l)) return true;
  return false;
}

void SearchState::assign(Literal l) {
  values_[l.var.index] = l.positive ? 1 : 0;
  trail_.push_back(l);
}

void SearchState::undo_to(std::size_t size) {
  while (trail_.size() > size) {
    values_[trail_.back().var.index] = -1;
    trail_.pop_back();
  }
}

Propagation unit_propagate(SearchState& state, std::span<const std::uint32_t> clauses) {
  Propagation out;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t ci : clauses) {
      const Clause& clause = state.cnf().clauses[ci];
      Literal unit{};
      std::size_t open = 0;
      bool sat = false;
      for (Literal l : clause) {
        if (state.is_true(l)) {
          sat = true;
          break;
        }
        if (!state.is_false(l)) {
          ++open;
          unit = l;
        }
      }
      if (sat) continue;
      if (open == 0) {
        out.conflict = true;
        return out;
      }
      if (open == 1) {
        state.assign(unit);
        out.implied.push_back(unit);
        changed = true;
      }
    }
  }
  return out;
}

std::vector<Component> decompose_components(const SearchState& state, std::span<const std::uint32_t> clauses) {
  // union-find over variables, one representative per open clause
  const auto& cnf = state.cnf();
  std::vector<std::uint32_t> open;
  for (std::uint32_t ci : clauses)
    if (!state.clause_satisfied(ci)) open.push_back(ci);
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());

  std::unordered_map<std::uint32_t, std::uint32_t> parent;
  auto find = [&](std::uint32_t v) {
    std::uint32_t r = v;
    while (parent[r] != r) r = parent[r];
    while (parent[v] != r) {
      std::uint32_t next = parent[v];
      parent[v] = r;
      v = next;
    }
    return r;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  std::vector<std::uint32_t> anchor(open.size(), 0);
  for (std::size_t k = 0; k < open.size(); ++k) {
    std::uint32_t first = 0;
    for (Literal l : cnf.clauses[open[k]]) {
      if (state.value(l.var) != -1) continue;
      parent.try_emplace(l.var.index, l.var.index);
      if (first == 0)
        first = l.var.index;
      else
        unite(first, l.var.index);
    }
    anchor[k] = first;  // 0 only for a conflicting clause, which propagation rules out
  }

  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<Component> out;
  for (std::size_t k = 0; k < open.size(); ++k) {
    std::uint32_t root = anchor[k] ? find(anchor[k]) : 0;
    auto [it, fresh] = slot.try_emplace(root, out.size());
    if (fresh) out.emplace_back();
    out[it->second].clauses.push_back(open[k]);
  }
  for (auto& comp : out) {
    for (std::uint32_t ci : comp.clauses)
      for (Literal l : cnf.clauses[ci])
        if (state.value(l.var) == -1) comp.vars.push_back(l.var);
    std::sort(comp.vars.begin(), comp.vars.end());
    comp.vars.erase(std::unique(comp.vars.begin(), comp.vars.end()), comp.vars.end());
  }
  return out;
}

Var pick_branch_var(const SearchState& state, const Component& component, VarOrder order, std::span<const Var> fixed_order) {
  if (component.vars.empty()) throw error("pick_branch_var on a component without variables");
  if (order == VarOrder::dfs_fixed) {
    for (Var v : fixed_order)
      if (std::binary_search(component.vars.begin(), component.vars.end(), v)) return v;
    return component.vars.front();
  }
  std::unordered_map<std::uint32_t, std::size_t> freq;
  for (std::uint32_t ci : component.clauses)
    for (Literal l : state.cnf().clauses[ci])
      if (state.value(l.var) == -1) ++freq[l.var.index];
  Var best = component.vars.front();
  std::size_t best_count = 0;
  for (Var v : component.vars) {  // ascending, so strict > keeps the smallest on ties
    std::size_t n = freq[v.index];
    if (n > best_count) {
      best = v;
      best_count = n;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
    std::size_t h = k.size();
    for (auto x : k) h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

class Compiler {
public:
  Compiler(const CnfFormula& cnf, const CompileOptions& opts)
      : cnf_(cnf), opts_(opts), state_(cnf), builder_(cnf.num_vars), start_(std::chrono::steady_clock::now()) {}

  NodeId run() {
    std::vector<std::uint32_t> all(cnf_.clauses.size());
    std::iota(all.begin(), all.end(), 0u);
    return compile_scope(all);
  }

  const CircuitBuilder& builder() const { return builder_; }
  CompileStats& stats() { return stats_; }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  NodeId compile_scope(std::span<const std::uint32_t> clauses) {
    std::size_t mark = state_.trail_size();
    Propagation prop = unit_propagate(state_, clauses);
    if (prop.conflict) {
      state_.undo_to(mark);
      return builder_.constant(false);
    }
    std::vector<NodeId> parts;
    for (Literal l : prop.implied) parts.push_back(builder_.literal(l));
    for (const auto& comp : decompose_components(state_, clauses)) {
      NodeId n = compile_component(comp);
      if (builder_.kind(n) == NodeKind::constant_false) {
        state_.undo_to(mark);
        return n;
      }
      parts.push_back(n);
    }
    state_.undo_to(mark);
    return builder_.conjunction(parts);
  }

  NodeId compile_component(const Component& comp) {
    check_time();
    std::vector<std::uint32_t> key;
    if (opts_.use_cache) {
      key.reserve(comp.clauses.size() + comp.vars.size() + 1);
      key.insert(key.end(), comp.clauses.begin(), comp.clauses.end());
      key.push_back(UINT32_MAX);
      for (Var v : comp.vars) key.push_back(v.index);
      if (auto it = cache_.find(key); it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
      }
    }

    Var v = pick_branch_var(state_, comp, opts_.var_order, opts_.fixed_order);
    ++stats_.decisions;
    std::size_t mark = state_.trail_size();
    state_.assign({v, true});
    NodeId hi = compile_scope(comp.clauses);
    state_.undo_to(mark);
    state_.assign({v, false});
    NodeId lo = compile_scope(comp.clauses);
    state_.undo_to(mark);
    NodeId node = builder_.decision(v, hi, lo);

    if (opts_.use_cache) {
      stats_.cache_bytes += key.size() * sizeof(std::uint32_t) + 64;
      if (stats_.cache_bytes > opts_.cache_bytes_cap) {
        stats_.time_ms = elapsed_ms();
        stats_.nodes = builder_.size();
        throw limit_error("component cache exceeds " + std::to_string(opts_.cache_bytes_cap) + " bytes (" +
                          stats_.summary() + ")");
      }
      cache_.emplace(std::move(key), node);
      ++stats_.cache_entries;
    }
    return node;
  }

  void check_time() {
    if (opts_.time_limit.count() > 0 && elapsed_ms() > static_cast<double>(opts_.time_limit.count())) {
      stats_.time_ms = elapsed_ms();
      stats_.nodes = builder_.size();
      throw limit_error("compilation timed out (" + stats_.summary() + ")");
    }
  }

  const CnfFormula& cnf_;
  const CompileOptions& opts_;
  SearchState state_;
  CircuitBuilder builder_;
  std::unordered_map<std::vector<std::uint32_t>, NodeId, KeyHash> cache_;
  CompileStats stats_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Circuit compile(const CnfFormula& cnf, const CompileOptions& options, CompileStats* stats) {
  if (cnf.clauses.size() > options.clause_cap)
    throw limit_error("CNF has " + std::to_string(cnf.clauses.size()) + " clauses, cap is " + std::to_string(options.clause_cap));
  for (const auto& clause : cnf.clauses)
    for (Literal l : clause)
      if (!l.var.valid() || l.var.index > cnf.num_vars) throw error("clause literal outside 1..num_vars");

  Compiler compiler(cnf, options);
  NodeId root = compiler.run();
  Circuit circuit = compiler.builder().build(root, DeterminismClaim::by_construction);
  if (options.smooth_output) circuit = smooth(circuit);
  if (stats) {
    *stats = compiler.stats();
    stats->nodes = circuit.size();
    stats->edges = circuit.num_edges();
    stats->time_ms = compiler.elapsed_ms();
  }
  return circuit;
}

Circuit compile(const Formula& formula, std::uint32_t num_vars, const CompileOptions& options, CompileStats* stats,
                std::vector<Var>* aux_vars) {
  CnfOptions cnf_opts;
  cnf_opts.num_vars = num_vars;
  cnf_opts.clause_cap = options.clause_cap;
  CnfFormula cnf;
  try {
    cnf = to_cnf(formula, CnfMode::distribute, cnf_opts);
  } catch (const limit_error&) {
    cnf = to_cnf(formula, CnfMode::tseitin, cnf_opts);
  }
  if (aux_vars) *aux_vars = cnf.aux_vars;
  return compile(cnf, options, stats);
}

}  // namespace nesy
