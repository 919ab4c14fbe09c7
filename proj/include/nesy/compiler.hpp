#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"

namespace nesy {

enum class VarOrder {
  most_frequent,  // variable in the most residual clauses, ties to the smallest index
  dfs_fixed,      // first unassigned component variable of a fixed order
};

struct CompileOptions {
  VarOrder var_order = VarOrder::most_frequent;
  /// Priority list for dfs_fixed; variables not listed follow in ascending
  /// index order. Empty means plain ascending order.
  std::vector<Var> fixed_order;
  bool use_cache = true;
  std::size_t cache_bytes_cap = std::size_t{512} << 20;
  /// Largest clause count accepted, including CNF produced from formulas.
  std::size_t clause_cap = std::size_t{1} << 22;
  std::chrono::milliseconds time_limit{0};  // 0: unlimited
  bool smooth_output = true;
};

struct CompileStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t decisions = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_entries = 0;
  std::size_t cache_bytes = 0;
  double time_ms = 0;

  /// `nodes=<n> edges=<e> cache_hits=<h> time_ms=<t>`
  std::string summary() const;
};

/// Compiles `cnf` into a decision-DNNF: decomposable and deterministic by
/// construction, smoothed unless `smooth_output` is false.
/// Throws limit_error (carrying the partial statistics) when a cap is hit.
Circuit compile(const CnfFormula& cnf, const CompileOptions& options = {}, CompileStats* stats = nullptr);

/// Converts with distribute mode, falling back to Tseitin when the clause
/// cap is exceeded, then compiles. Auxiliary variables are numbered after
/// `num_vars` (0: the formula's largest variable).
Circuit compile(const Formula& formula, std::uint32_t num_vars, const CompileOptions& options = {},
                CompileStats* stats = nullptr, std::vector<Var>* aux_vars = nullptr);

// ---------------------------------------------------------------------------
// Search primitives, exposed for testing.

/// Partial assignment plus trail over one CNF.
class SearchState {
public:
  explicit SearchState(const CnfFormula& cnf);

  const CnfFormula& cnf() const noexcept { return *cnf_; }
  /// -1 unassigned, 0 false, 1 true.
  int value(Var v) const noexcept { return values_[v.index]; }
  bool is_true(Literal l) const noexcept { return values_[l.var.index] == (l.positive ? 1 : 0); }
  bool is_false(Literal l) const noexcept { return values_[l.var.index] == (l.positive ? 0 : 1); }
  bool clause_satisfied(std::uint32_t clause) const;

  void assign(Literal l);
  std::size_t trail_size() const noexcept { return trail_.size(); }
  std::span<const Literal> trail() const noexcept { return trail_; }
  void undo_to(std::size_t size);

private:
  const CnfFormula* cnf_;
  std::vector<signed char> values_;
  std::vector<Literal> trail_;
};

struct Propagation {
  bool conflict = false;
  std::vector<Literal> implied;  // in propagation order; left assigned on the trail
};

/// Unit propagation to fixpoint over the listed clauses.
Propagation unit_propagate(SearchState& state, std::span<const std::uint32_t> clauses);

struct Component {
  std::vector<std::uint32_t> clauses;  // unsatisfied clause indices, ascending
  std::vector<Var> vars;               // unassigned variables, ascending
};

/// Connected components of the clause/variable incidence graph restricted to
/// unsatisfied clauses and unassigned variables, ordered by first clause.
std::vector<Component> decompose_components(const SearchState& state, std::span<const std::uint32_t> clauses);

Var pick_branch_var(const SearchState& state, const Component& component, VarOrder order,
                    std::span<const Var> fixed_order = {});

}  // namespace nesy
