#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"

namespace nesy {

/// or_i(and(+v_i, -v_j for j != i)) over `vars`, built into `b`.
/// Deterministic, smooth and decomposable by construction.
NodeId exactly_one(CircuitBuilder& b, std::span<const Var> vars);

/// One-hot constraint over variables 1..n.
Circuit exactly_one(std::uint32_t n);

/// Permutation-matrix constraint: variable `total_order_var(n, i, j)` means
/// item i sits at position j (0-based). Every row and column is one-hot.
CnfFormula total_order(std::uint32_t n);

constexpr Var total_order_var(std::uint32_t n, std::uint32_t item, std::uint32_t position) {
  return Var{item * n + position + 1};
}

struct GridSpec {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::size_t path_cap = 1u << 22;  // over all endpoint pairs
};

/// Variable layout of a grid-path constraint: vertex indicators first
/// (vertex r*cols + c is variable r*cols + c + 1), then one variable per edge.
/// Edges are listed per vertex in row-major order, right neighbour first.
class GridLayout {
public:
  explicit GridLayout(const GridSpec& spec);

  std::uint32_t num_vertices() const noexcept { return spec_.rows * spec_.cols; }
  std::uint32_t num_edges() const noexcept { return static_cast<std::uint32_t>(edges_.size()); }
  std::uint32_t num_vars() const noexcept { return num_vertices() + num_edges(); }

  Var vertex_var(std::uint32_t v) const noexcept { return Var{v + 1}; }
  Var edge_var(std::uint32_t e) const noexcept { return Var{num_vertices() + e + 1}; }
  std::pair<std::uint32_t, std::uint32_t> edge(std::uint32_t e) const { return edges_.at(e); }

private:
  GridSpec spec_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

/// Disjunction, over unordered endpoint pairs {s, t} and every simple path
/// between them, of the complete term fixing exactly the indicators of s and
/// t and exactly the path's edges. Throws limit_error past `path_cap`.
Circuit grid_simple_paths(const GridSpec& spec);

struct Relation {
  std::string name;
  std::string subject;
  std::string object;
};

struct OntologySpec {
  std::vector<std::string> entity_types;
  std::vector<Relation> relations;
  std::uint32_t slots = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // 1-based slots
};

/// Variables: per slot a one-hot block over entity types, then per pair a
/// one-hot block over the relations followed by "no relation".
class OntologyLayout {
public:
  explicit OntologyLayout(const OntologySpec& spec)
      : types_(static_cast<std::uint32_t>(spec.entity_types.size())),
        relations_(static_cast<std::uint32_t>(spec.relations.size())),
        slots_(spec.slots),
        pairs_(static_cast<std::uint32_t>(spec.pairs.size())) {}

  /// slot and type are 0-based.
  Var type_var(std::uint32_t slot, std::uint32_t type) const noexcept { return Var{slot * types_ + type + 1}; }
  /// relation == num relations selects "no relation".
  Var relation_var(std::uint32_t pair, std::uint32_t relation) const noexcept {
    return Var{slots_ * types_ + pair * (relations_ + 1) + relation + 1};
  }
  std::uint32_t num_vars() const noexcept { return slots_ * types_ + pairs_ * (relations_ + 1); }

private:
  std::uint32_t types_, relations_, slots_, pairs_;
};

/// Throws error on unknown or duplicate names and out-of-range slots.
void validate(const OntologySpec& spec);

/// One-hot blocks plus R_ij -> type(i) = subject(R) and R_ij -> type(j) = object(R).
CnfFormula ontology_constraint(const OntologySpec& spec);

/// Lines `type <name>`, `relation <name> <subject> <object>`, `slots <k>`,
/// `pair <i> <j>`; `#` starts a comment.
OntologySpec parse_ontology_spec(std::string_view text);

}  // namespace nesy
