#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nesy/error.hpp"

namespace nesy {

/// Boolean variable, 1-based. Index 0 is reserved as "no variable".
struct Var {
  std::uint32_t index = 0;

  constexpr bool valid() const noexcept { return index != 0; }
  friend constexpr auto operator<=>(Var, Var) = default;
};

struct Literal {
  Var var;
  bool positive = true;

  constexpr Literal operator~() const noexcept { return {var, !positive}; }

  /// DIMACS encoding: +v / -v.
  constexpr int to_dimacs() const noexcept {
    return positive ? static_cast<int>(var.index) : -static_cast<int>(var.index);
  }
  static constexpr Literal from_dimacs(int lit) noexcept {
    return lit > 0 ? Literal{Var{static_cast<std::uint32_t>(lit)}, true}
                   : Literal{Var{static_cast<std::uint32_t>(-lit)}, false};
  }

  friend constexpr auto operator<=>(Literal a, Literal b) noexcept {
    return a.to_dimacs() <=> b.to_dimacs();
  }
  friend constexpr bool operator==(Literal, Literal) = default;
};

constexpr Literal pos(std::uint32_t v) noexcept { return {Var{v}, true}; }
constexpr Literal neg(std::uint32_t v) noexcept { return {Var{v}, false}; }

enum class FormulaKind : std::uint8_t { constant, literal, negation, conjunction, disjunction, implication, parity, exactly_one };

class Formula;

struct FormulaNode {
  FormulaKind kind;
  bool value = false;  // constant
  Literal lit{};       // literal
  std::vector<Formula> children;
};

/// Immutable, shareable Boolean formula AST.
class Formula {
public:
  static Formula constant(bool value);
  static Formula literal(Literal lit);
  static Formula variable(Var v) { return literal({v, true}); }
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula premise, Formula conclusion);
  /// Odd parity of the children (binary xor when two children).
  static Formula parity(std::vector<Formula> children);
  static Formula exactly_one(std::vector<Formula> children);

  FormulaKind kind() const noexcept { return node_->kind; }
  bool value() const noexcept { return node_->value; }
  Literal literal() const noexcept { return node_->lit; }
  const std::vector<Formula>& children() const noexcept { return node_->children; }

private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

using Clause = std::vector<Literal>;

/// CNF over variables 1..num_vars. An empty clause list is true; a present
/// empty clause is false.
struct CnfFormula {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;
  std::vector<Var> aux_vars;  // variables introduced by an encoding, sorted
};

/// Total map from variables 1..n to truth values.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::uint32_t num_vars) : values_(num_vars, -1) {}

  /// Bit i-1 of `bits` is the value of variable i.
  static Assignment from_bits(std::uint32_t num_vars, std::uint64_t bits);

  std::uint32_t num_vars() const noexcept { return static_cast<std::uint32_t>(values_.size()); }
  void set(Var v, bool value);
  bool has(Var v) const noexcept { return v.valid() && v.index <= values_.size() && values_[v.index - 1] >= 0; }
  /// Throws computation_error when `v` is not covered.
  bool value(Var v) const;
  bool satisfies(Literal lit) const { return value(lit.var) == lit.positive; }

private:
  std::vector<signed char> values_;
};

/// Bidirectional variable-name table produced by the constraint DSL.
class NameTable {
public:
  Var intern(const std::string& name);
  std::optional<Var> find(std::string_view name) const;
  const std::string& name(Var v) const { return names_.at(v.index - 1); }
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(names_.size()); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Var> index_;
};

struct DslParse {
  Formula formula;
  NameTable names;
};

enum class CnfMode { distribute, tseitin };

struct CnfOptions {
  std::size_t clause_cap = 1u << 20;  // distribute mode only
  std::uint32_t num_vars = 0;          // 0: largest variable index in the formula
};

CnfFormula parse_dimacs(std::string_view text);
std::string write_dimacs(const CnfFormula& cnf);

/// S-expressions over `and or not implies xor exactly-one` plus the atoms
/// `true`/`false` and variable names. Several top-level forms are conjoined.
/// `;` starts a comment.
DslParse parse_constraint_dsl(std::string_view text);

/// Lines `<name> <index>`.
std::string write_name_table(const NameTable& names);
NameTable parse_name_table(std::string_view text);

/// distribute: equivalent CNF over the formula's own variables; throws
/// limit_error past `clause_cap`. tseitin: equisatisfiable CNF whose
/// auxiliary variables (numbered after `num_vars`) are biconditionally
/// defined, so every model extends uniquely.
CnfFormula to_cnf(const Formula& formula, CnfMode mode, const CnfOptions& options = {});

bool eval_formula(const Formula& formula, const Assignment& a);
bool eval_cnf(const CnfFormula& cnf, const Assignment& a);

/// Sorted, deduplicated variables mentioned by the formula.
std::vector<Var> formula_variables(const Formula& formula);

}  // namespace nesy
