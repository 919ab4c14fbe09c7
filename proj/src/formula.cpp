#include "nesy/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

namespace nesy {

// ---------------------------------------------------------------------------
// Formula construction

Formula Formula::constant(bool value) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::constant, value, {}, {}}));
}

Formula Formula::literal(Literal lit) {
  if (!lit.var.valid()) throw error("literal over reserved variable 0");
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::literal, false, lit, {}}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::negation, false, {}, {std::move(f)}}));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::conjunction, false, {}, std::move(children)}));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::disjunction, false, {}, std::move(children)}));
}

Formula Formula::implication(Formula premise, Formula conclusion) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{FormulaKind::implication, false, {}, {std::move(premise), std::move(conclusion)}}));
}

Formula Formula::parity(std::vector<Formula> children) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::parity, false, {}, std::move(children)}));
}

Formula Formula::exactly_one(std::vector<Formula> children) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::exactly_one, false, {}, std::move(children)}));
}

// ---------------------------------------------------------------------------
// Assignment / NameTable

Assignment Assignment::from_bits(std::uint32_t num_vars, std::uint64_t bits) {
  Assignment a(num_vars);
  for (std::uint32_t i = 0; i < num_vars; ++i) a.values_[i] = static_cast<signed char>((bits >> i) & 1u);
  return a;
}

void Assignment::set(Var v, bool value) {
  if (!v.valid()) throw computation_error("assignment to reserved variable 0");
  if (v.index > values_.size()) values_.resize(v.index, -1);
  values_[v.index - 1] = value ? 1 : 0;
}

bool Assignment::value(Var v) const {
  if (!has(v)) throw computation_error("variable " + std::to_string(v.index) + " missing from assignment");
  return values_[v.index - 1] == 1;
}

Var NameTable::intern(const std::string& name) {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  names_.push_back(name);
  Var v{static_cast<std::uint32_t>(names_.size())};
  index_.emplace(name, v);
  return v;
}

std::optional<Var> NameTable::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::string write_name_table(const NameTable& names) {
  std::string out;
  for (std::uint32_t i = 1; i <= names.size(); ++i) out += names.name(Var{i}) + " " + std::to_string(i) + "\n";
  return out;
}

NameTable parse_name_table(std::string_view text) {
  NameTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string name;
    long long index = 0;
    if (!(fields >> name)) continue;
    if (!(fields >> index)) throw parse_error("expected `<name> <index>`", lineno);
    if (index != static_cast<long long>(table.size()) + 1)
      throw parse_error("name table indices must be dense and increasing", lineno);
    if (table.find(name)) throw parse_error("duplicate name `" + name + "`", lineno);
    table.intern(name);
  }
  return table;
}

// ---------------------------------------------------------------------------
// DIMACS

namespace {

std::optional<long long> parse_int(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!f(line, lineno)) return;
    start = end + 1;
  }
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula cnf;
  bool have_header = false;
  long long declared_clauses = 0;
  Clause current;
  std::size_t current_line = 0;

  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    auto tokens = split_ws(line);
    if (tokens.empty()) return true;
    if (tokens[0] == "%") return false;
    if (tokens[0][0] == 'c') {
      if (tokens[0] == "c" && tokens.size() > 1 && tokens[1] == "aux") {
        for (std::size_t i = 2; i < tokens.size(); ++i) {
          auto v = parse_int(tokens[i]);
          if (!v || *v <= 0) throw parse_error("bad aux variable `" + std::string(tokens[i]) + "`", lineno);
          cnf.aux_vars.push_back(Var{static_cast<std::uint32_t>(*v)});
        }
      }
      return true;
    }
    if (tokens[0] == "p") {
      if (have_header) throw parse_error("duplicate header", lineno);
      if (tokens.size() != 4 || tokens[1] != "cnf") throw parse_error("malformed header, expected `p cnf <vars> <clauses>`", lineno);
      auto vars = parse_int(tokens[2]);
      auto clauses = parse_int(tokens[3]);
      if (!vars || !clauses || *vars < 0 || *clauses < 0 || *vars > std::numeric_limits<int>::max())
        throw parse_error("malformed header counts", lineno);
      cnf.num_vars = static_cast<std::uint32_t>(*vars);
      declared_clauses = *clauses;
      have_header = true;
      return true;
    }
    if (!have_header) throw parse_error("clause before `p cnf` header", lineno);
    for (auto token : tokens) {
      auto lit = parse_int(token);
      if (!lit) throw parse_error("bad literal `" + std::string(token) + "`", lineno);
      if (*lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (*lit > cnf.num_vars || -*lit > cnf.num_vars)
        throw parse_error("literal " + std::string(token) + " out of range (" + std::to_string(cnf.num_vars) + " vars)", lineno);
      current.push_back(Literal::from_dimacs(static_cast<int>(*lit)));
      current_line = lineno;
    }
    return true;
  });

  if (!have_header) throw parse_error("missing `p cnf` header");
  if (!current.empty()) throw parse_error("clause missing terminating 0", current_line);
  if (static_cast<long long>(cnf.clauses.size()) != declared_clauses)
    throw parse_error("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                      std::to_string(cnf.clauses.size()));
  for (Var v : cnf.aux_vars)
    if (v.index > cnf.num_vars) throw parse_error("aux variable " + std::to_string(v.index) + " out of range");
  std::sort(cnf.aux_vars.begin(), cnf.aux_vars.end());
  cnf.aux_vars.erase(std::unique(cnf.aux_vars.begin(), cnf.aux_vars.end()), cnf.aux_vars.end());
  return cnf;
}

std::string write_dimacs(const CnfFormula& cnf) {
  std::string out;
  if (!cnf.aux_vars.empty()) {
    out += "c aux";
    for (Var v : cnf.aux_vars) out += " " + std::to_string(v.index);
    out += "\n";
  }
  out += "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& clause : cnf.clauses) {
    for (Literal l : clause) out += std::to_string(l.to_dimacs()) + " ";
    out += "0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constraint DSL

namespace {

class DslParser {
public:
  explicit DslParser(std::string_view text) : text_(text) {}

  DslParse run() {
    std::vector<Formula> forms;
    skip_space();
    while (pos_ < text_.size()) {
      forms.push_back(expr());
      skip_space();
    }
    if (forms.empty()) throw parse_error("empty constraint");
    Formula f = forms.size() == 1 ? forms.front() : Formula::conjunction(std::move(forms));
    return {std::move(f), std::move(names_)};
  }

private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_operator(const std::string& s) {
    return s == "and" || s == "or" || s == "not" || s == "implies" || s == "xor" || s == "exactly-one";
  }

  Formula expr() {
    skip_space();
    if (pos_ >= text_.size()) throw parse_error("unexpected end of input", line_);
    if (text_[pos_] == ')') throw parse_error("unbalanced `)`", line_);
    if (text_[pos_] != '(') {
      std::string name = atom();
      if (name == "true") return Formula::constant(true);
      if (name == "false") return Formula::constant(false);
      if (is_operator(name)) throw parse_error("operator `" + name + "` used as a variable", line_);
      return Formula::variable(names_.intern(name));
    }
    std::size_t open_line = line_;
    ++pos_;
    skip_space();
    std::string op = atom();
    if (op.empty()) throw parse_error("expected operator after `(`", line_);
    if (!is_operator(op)) throw parse_error("unknown operator `" + op + "`", line_);
    std::vector<Formula> args;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) throw parse_error("unbalanced `(`", open_line);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      args.push_back(expr());
    }
    auto arity = [&](bool ok, const char* expected) {
      if (!ok) throw parse_error("`" + op + "` expects " + expected + " arguments, got " + std::to_string(args.size()), open_line);
    };
    if (op == "not") {
      arity(args.size() == 1, "1");
      return Formula::negation(std::move(args[0]));
    }
    if (op == "implies") {
      arity(args.size() == 2, "2");
      return Formula::implication(std::move(args[0]), std::move(args[1]));
    }
    if (op == "xor") {
      arity(args.size() >= 2, "at least 2");
      return Formula::parity(std::move(args));
    }
    arity(!args.empty(), "at least 1");
    if (op == "and") return Formula::conjunction(std::move(args));
    if (op == "or") return Formula::disjunction(std::move(args));
    return Formula::exactly_one(std::move(args));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  NameTable names_;
};

}  // namespace

DslParse parse_constraint_dsl(std::string_view text) { return DslParser(text).run(); }

// ---------------------------------------------------------------------------
// Evaluation

bool eval_formula(const Formula& f, const Assignment& a) {
  const auto& ch = f.children();
  switch (f.kind()) {
    case FormulaKind::constant: return f.value();
    case FormulaKind::literal: return a.satisfies(f.literal());
    case FormulaKind::negation: return !eval_formula(ch[0], a);
    case FormulaKind::conjunction:
      return std::all_of(ch.begin(), ch.end(), [&](const Formula& c) { return eval_formula(c, a); });
    case FormulaKind::disjunction:
      return std::any_of(ch.begin(), ch.end(), [&](const Formula& c) { return eval_formula(c, a); });
    case FormulaKind::implication: return !eval_formula(ch[0], a) || eval_formula(ch[1], a);
    case FormulaKind::parity: {
      bool odd = false;
      for (const auto& c : ch) odd ^= eval_formula(c, a);
      return odd;
    }
    case FormulaKind::exactly_one: {
      std::size_t n = 0;
      for (const auto& c : ch) n += eval_formula(c, a) ? 1 : 0;
      return n == 1;
    }
  }
  return false;
}

bool eval_cnf(const CnfFormula& cnf, const Assignment& a) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const Clause& clause) {
    return std::any_of(clause.begin(), clause.end(), [&](Literal l) { return a.satisfies(l); });
  });
}

namespace {

void collect_vars(const Formula& f, std::vector<Var>& out) {
  if (f.kind() == FormulaKind::literal) out.push_back(f.literal().var);
  for (const auto& c : f.children()) collect_vars(c, out);
}

}  // namespace

std::vector<Var> formula_variables(const Formula& f) {
  std::vector<Var> vars;
  collect_vars(f, vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

// ---------------------------------------------------------------------------
// CNF conversion

namespace {

using ClauseSet = std::vector<Clause>;

// Sorted, duplicate-free; nullopt for tautologies.
std::optional<Clause> normalize(Clause c) {
  std::sort(c.begin(), c.end(), [](Literal a, Literal b) {
    return a.var.index != b.var.index ? a.var.index < b.var.index : a.positive < b.positive;
  });
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].var == c[i - 1].var) return std::nullopt;
  return c;
}

class Distributor {
public:
  explicit Distributor(std::size_t cap) : cap_(cap) {}

  ClauseSet cnf(const Formula& f, bool positive) {
    const auto& ch = f.children();
    switch (f.kind()) {
      case FormulaKind::constant:
        return f.value() == positive ? ClauseSet{} : ClauseSet{Clause{}};
      case FormulaKind::literal:
        return {Clause{positive ? f.literal() : ~f.literal()}};
      case FormulaKind::negation:
        return cnf(ch[0], !positive);
      case FormulaKind::conjunction:
        return positive ? concat_children(ch, true) : product_children(ch, false);
      case FormulaKind::disjunction:
        return positive ? product_children(ch, true) : concat_children(ch, false);
      case FormulaKind::implication:
        if (positive) return product({cnf(ch[0], false), cnf(ch[1], true)});
        return concat({cnf(ch[0], true), cnf(ch[1], false)});
      case FormulaKind::parity: {
        if (ch.empty()) return cnf(Formula::constant(false), positive);
        if (ch.size() == 1) return cnf(ch[0], positive);
        if (ch.size() > 2) {
          Formula head = Formula::parity(std::vector<Formula>(ch.begin(), ch.end() - 1));
          return cnf(Formula::parity({head, ch.back()}), positive);
        }
        // a xor b == (a | b) & (~a | ~b);  ~(a xor b) == (a | ~b) & (~a | b)
        return concat({product({cnf(ch[0], true), cnf(ch[1], positive)}),
                       product({cnf(ch[0], false), cnf(ch[1], !positive)})});
      }
      case FormulaKind::exactly_one: {
        if (positive) {
          std::vector<ClauseSet> parts{product_children(ch, true)};
          for (std::size_t i = 0; i < ch.size(); ++i)
            for (std::size_t j = i + 1; j < ch.size(); ++j) parts.push_back(product({cnf(ch[i], false), cnf(ch[j], false)}));
          return concat(std::move(parts));
        }
        // none true, or some pair both true
        std::vector<Formula> cases;
        std::vector<Formula> none;
        for (const auto& c : ch) none.push_back(Formula::negation(c));
        cases.push_back(Formula::conjunction(std::move(none)));
        for (std::size_t i = 0; i < ch.size(); ++i)
          for (std::size_t j = i + 1; j < ch.size(); ++j) cases.push_back(Formula::conjunction({ch[i], ch[j]}));
        return cnf(Formula::disjunction(std::move(cases)), true);
      }
    }
    return {};
  }

private:
  ClauseSet concat_children(const std::vector<Formula>& ch, bool positive) {
    std::vector<ClauseSet> parts;
    for (const auto& c : ch) parts.push_back(cnf(c, positive));
    return concat(std::move(parts));
  }

  ClauseSet product_children(const std::vector<Formula>& ch, bool positive) {
    std::vector<ClauseSet> parts;
    for (const auto& c : ch) parts.push_back(cnf(c, positive));
    return product(std::move(parts));
  }

  ClauseSet concat(std::vector<ClauseSet> parts) {
    ClauseSet out;
    for (auto& p : parts) {
      if (out.size() + p.size() > cap_) throw limit_error("CNF distribution exceeds clause cap " + std::to_string(cap_));
      for (auto& c : p) out.push_back(std::move(c));
    }
    return out;
  }

  // Disjunction of CNFs: one clause from each part, merged.
  ClauseSet product(std::vector<ClauseSet> parts) {
    std::size_t total = 1;
    for (const auto& p : parts) {
      if (p.empty()) return {};  // a true disjunct
      if (total > cap_ / p.size() + 1) throw limit_error("CNF distribution exceeds clause cap " + std::to_string(cap_));
      total *= p.size();
    }
    if (total > cap_) throw limit_error("CNF distribution exceeds clause cap " + std::to_string(cap_));
    ClauseSet acc{Clause{}};
    for (const auto& p : parts) {
      ClauseSet next;
      for (const auto& a : acc) {
        for (const auto& b : p) {
          Clause merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          if (auto n = normalize(std::move(merged))) next.push_back(std::move(*n));
        }
      }
      acc = std::move(next);
    }
    return acc;
  }

  std::size_t cap_;
};

// Removes constants; the result is either a constant or constant-free.
Formula fold_constants(const Formula& f) {
  auto is_const = [](const Formula& g, bool v) { return g.kind() == FormulaKind::constant && g.value() == v; };
  const auto& ch = f.children();
  switch (f.kind()) {
    case FormulaKind::constant:
    case FormulaKind::literal: return f;
    case FormulaKind::negation: {
      Formula c = fold_constants(ch[0]);
      if (c.kind() == FormulaKind::constant) return Formula::constant(!c.value());
      return Formula::negation(c);
    }
    case FormulaKind::conjunction:
    case FormulaKind::disjunction: {
      bool conj = f.kind() == FormulaKind::conjunction;
      std::vector<Formula> kept;
      for (const auto& c : ch) {
        Formula g = fold_constants(c);
        if (is_const(g, !conj)) return Formula::constant(!conj);
        if (!is_const(g, conj)) kept.push_back(g);
      }
      if (kept.empty()) return Formula::constant(conj);
      if (kept.size() == 1) return kept.front();
      return conj ? Formula::conjunction(std::move(kept)) : Formula::disjunction(std::move(kept));
    }
    case FormulaKind::implication:
      return fold_constants(Formula::disjunction({Formula::negation(ch[0]), ch[1]}));
    case FormulaKind::parity: {
      bool flip = false;
      std::vector<Formula> kept;
      for (const auto& c : ch) {
        Formula g = fold_constants(c);
        if (g.kind() == FormulaKind::constant)
          flip ^= g.value();
        else
          kept.push_back(g);
      }
      if (kept.empty()) return Formula::constant(flip);
      Formula core = kept.size() == 1 ? kept.front() : Formula::parity(std::move(kept));
      return flip ? Formula::negation(core) : core;
    }
    case FormulaKind::exactly_one: {
      std::size_t trues = 0;
      std::vector<Formula> kept;
      for (const auto& c : ch) {
        Formula g = fold_constants(c);
        if (g.kind() == FormulaKind::constant)
          trues += g.value() ? 1 : 0;
        else
          kept.push_back(g);
      }
      if (trues >= 2) return Formula::constant(false);
      if (trues == 1) {
        if (kept.empty()) return Formula::constant(true);
        std::vector<Formula> negs;
        for (auto& g : kept) negs.push_back(Formula::negation(g));
        return negs.size() == 1 ? negs.front() : Formula::conjunction(std::move(negs));
      }
      if (kept.empty()) return Formula::constant(false);
      if (kept.size() == 1) return kept.front();
      return Formula::exactly_one(std::move(kept));
    }
  }
  return f;
}

class TseitinEncoder {
public:
  TseitinEncoder(CnfFormula& out) : out_(out) {}

  Literal encode(const Formula& f) {
    const auto& ch = f.children();
    switch (f.kind()) {
      case FormulaKind::constant: throw error("internal: constant survived folding");
      case FormulaKind::literal: return f.literal();
      case FormulaKind::negation: return ~encode(ch[0]);
      case FormulaKind::conjunction: return define_and(encode_all(ch));
      case FormulaKind::disjunction: return define_or(encode_all(ch));
      case FormulaKind::implication: return define_or({~encode(ch[0]), encode(ch[1])});
      case FormulaKind::parity: {
        auto lits = encode_all(ch);
        Literal acc = lits[0];
        for (std::size_t i = 1; i < lits.size(); ++i) acc = define_xor(acc, lits[i]);
        return acc;
      }
      case FormulaKind::exactly_one: {
        auto lits = encode_all(ch);
        if (lits.size() == 1) return lits[0];
        std::vector<Literal> parts{define_or(lits)};
        for (std::size_t i = 0; i < lits.size(); ++i)
          for (std::size_t j = i + 1; j < lits.size(); ++j) parts.push_back(define_or({~lits[i], ~lits[j]}));
        return define_and(parts);
      }
    }
    throw error("internal: unknown formula kind");
  }

private:
  std::vector<Literal> encode_all(const std::vector<Formula>& ch) {
    std::vector<Literal> out;
    for (const auto& c : ch) out.push_back(encode(c));
    return out;
  }

  Literal fresh() {
    Var v{++out_.num_vars};
    out_.aux_vars.push_back(v);
    return {v, true};
  }

  Literal define_and(const std::vector<Literal>& in) {
    if (in.size() == 1) return in[0];
    Literal x = fresh();
    Clause back{x};
    for (Literal l : in) {
      out_.clauses.push_back({~x, l});
      back.push_back(~l);
    }
    out_.clauses.push_back(std::move(back));
    return x;
  }

  Literal define_or(const std::vector<Literal>& in) {
    if (in.size() == 1) return in[0];
    Literal x = fresh();
    Clause fwd{~x};
    for (Literal l : in) {
      out_.clauses.push_back({x, ~l});
      fwd.push_back(l);
    }
    out_.clauses.push_back(std::move(fwd));
    return x;
  }

  Literal define_xor(Literal a, Literal b) {
    Literal x = fresh();
    out_.clauses.push_back({~x, a, b});
    out_.clauses.push_back({~x, ~a, ~b});
    out_.clauses.push_back({x, ~a, b});
    out_.clauses.push_back({x, a, ~b});
    return x;
  }

  CnfFormula& out_;
};

}  // namespace

CnfFormula to_cnf(const Formula& formula, CnfMode mode, const CnfOptions& options) {
  auto vars = formula_variables(formula);
  std::uint32_t base = vars.empty() ? 0 : vars.back().index;
  if (options.num_vars != 0) {
    if (options.num_vars < base) throw error("num_vars smaller than largest formula variable");
    base = options.num_vars;
  }

  CnfFormula out;
  out.num_vars = base;
  if (mode == CnfMode::distribute) {
    for (auto& c : Distributor(options.clause_cap).cnf(formula, true)) out.clauses.push_back(std::move(c));
    // duplicate clauses are harmless but noisy
    std::set<std::vector<int>> seen;
    std::vector<Clause> unique;
    for (auto& c : out.clauses) {
      std::vector<int> key;
      for (Literal l : c) key.push_back(l.to_dimacs());
      if (seen.insert(std::move(key)).second) unique.push_back(std::move(c));
    }
    out.clauses = std::move(unique);
    return out;
  }

  Formula folded = fold_constants(formula);
  if (folded.kind() == FormulaKind::constant) {
    if (!folded.value()) out.clauses.push_back({});
    return out;
  }
  TseitinEncoder enc(out);
  Literal root = enc.encode(folded);
  out.clauses.push_back({root});
  return out;
}

}  // namespace nesy
