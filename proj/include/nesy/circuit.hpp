#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nesy/formula.hpp"

namespace nesy {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { constant_false, constant_true, literal, and_gate, or_gate };

/// Read-only view of one circuit node. `children` is empty for leaves;
/// `decision` is the variable an OR node branches on, or Var{} if unknown.
struct NodeView {
  NodeKind kind;
  Literal lit;
  Var decision;
  std::span<const NodeId> children;
};

/// Fixed-universe bitset over variables 1..num_vars.
class VarSet {
public:
  VarSet() = default;
  explicit VarSet(std::uint32_t num_vars) : words_((num_vars + 63) / 64, 0), num_vars_(num_vars) {}

  void insert(Var v) { words_[(v.index - 1) / 64] |= bit(v); }
  bool contains(Var v) const {
    return v.valid() && v.index <= num_vars_ && (words_[(v.index - 1) / 64] & bit(v)) != 0;
  }
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool intersects(const VarSet& other) const;
  VarSet& operator|=(const VarSet& other);
  /// Members of `*this` not in `other`, ascending.
  std::vector<Var> minus(const VarSet& other) const;
  std::vector<Var> to_vector() const;
  friend bool operator==(const VarSet&, const VarSet&) = default;

private:
  static std::uint64_t bit(Var v) { return std::uint64_t{1} << ((v.index - 1) % 64); }
  std::vector<std::uint64_t> words_;
  std::uint32_t num_vars_ = 0;
};

struct CircuitProperties {
  bool decomposable = false;
  bool smooth = false;         // every OR node's children mention the same variables
  bool deterministic = false;  // set by construction or by a structural certificate
};

/// Immutable logical circuit stored in topological order: every child id is
/// smaller than its parent's, and the root is the last node.
class Circuit {
public:
  std::uint32_t num_vars() const noexcept { return num_vars_; }
  NodeId root() const noexcept { return static_cast<NodeId>(kinds_.size() - 1); }
  std::size_t size() const noexcept { return kinds_.size(); }
  std::size_t num_edges() const noexcept { return children_.size(); }

  NodeView node(NodeId id) const {
    return {kinds_[id], lits_[id], decisions_[id],
            std::span<const NodeId>(children_).subspan(offsets_[id], offsets_[id + 1] - offsets_[id])};
  }

  /// Variables at or below `id`.
  const VarSet& variables(NodeId id) const { return varsets_[id]; }
  const CircuitProperties& properties() const noexcept { return props_; }

private:
  friend class CircuitBuilder;
  Circuit() = default;

  std::uint32_t num_vars_ = 0;
  std::vector<NodeKind> kinds_;
  std::vector<Literal> lits_;
  std::vector<Var> decisions_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<NodeId> children_;
  std::vector<VarSet> varsets_;
  CircuitProperties props_;
};

enum class DeterminismClaim {
  none,             // leave the flag unset
  by_construction,  // caller's construction guarantees disjoint OR children
  certify,          // run certify_determinism()
};

/// Hash-consing circuit builder. AND gates are binarized, children are
/// sorted and deduplicated, constants are folded.
class CircuitBuilder {
public:
  explicit CircuitBuilder(std::uint32_t num_vars) : num_vars_(num_vars) {}

  std::uint32_t num_vars() const noexcept { return num_vars_; }
  std::size_t size() const noexcept { return kinds_.size(); }

  NodeId constant(bool value);
  NodeId literal(Literal lit);
  /// Empty input yields the true node.
  NodeId conjunction(std::span<const NodeId> children);
  NodeId conjunction(std::initializer_list<NodeId> children) {
    return conjunction(std::span<const NodeId>(children.begin(), children.size()));
  }
  /// Throws on empty input; false children are dropped.
  NodeId disjunction(std::span<const NodeId> children, Var decision = {});
  NodeId disjunction(std::initializer_list<NodeId> children, Var decision = {}) {
    return disjunction(std::span<const NodeId>(children.begin(), children.size()), decision);
  }
  /// or(and(+v, hi), and(-v, lo)), simplified when a branch is false.
  NodeId decision(Var v, NodeId hi, NodeId lo);

  NodeKind kind(NodeId id) const { return kinds_.at(id); }

  /// Seals the sub-circuit reachable from `root` into a compact Circuit.
  Circuit build(NodeId root, DeterminismClaim claim) const;

private:
  struct Key {
    NodeKind kind;
    int lit;
    std::uint32_t decision;
    std::vector<NodeId> children;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  NodeId intern(NodeKind kind, Literal lit, Var decision, std::vector<NodeId> children);
  void check_children(std::span<const NodeId> children) const;

  std::uint32_t num_vars_;
  std::vector<NodeKind> kinds_;
  std::vector<Literal> lits_;
  std::vector<Var> decisions_;
  std::vector<std::vector<NodeId>> children_;
  std::unordered_map<Key, NodeId, KeyHash> table_;
};

/// Boolean verdict plus the offending node ids, ascending.
struct StructureReport {
  bool ok = true;
  std::vector<NodeId> violations;
};

inline const VarSet& variables(const Circuit& c, NodeId id) { return c.variables(id); }

StructureReport check_decomposable(const Circuit& c);
StructureReport check_smooth(const Circuit& c);

/// Sound, incomplete linear-ish determinism certificate: every pair of OR
/// children must force complementary literals through their AND spines.
/// Violations list OR nodes lacking a certificate (not necessarily
/// non-deterministic).
StructureReport certify_determinism(const Circuit& c);

/// Parent/child id order holds for every edge.
bool check_topological(const Circuit& c);

/// Equivalent circuit in which every OR child mentions the OR's full variable
/// set and the root mentions every variable 1..num_vars, using one shared
/// or(+V, -V) gadget per variable. Requires decomposability.
Circuit smooth(const Circuit& c);

/// c2d-style NNF: `nnf <nodes> <edges> <vars>` then `L <lit>`,
/// `A <c> <ids...>`, `O <j> <c> <ids...>`; the last line is the root.
Circuit read_nnf(std::string_view text);
std::string write_nnf(const Circuit& c);

}  // namespace nesy
