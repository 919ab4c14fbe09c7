#include "nesy/constraints.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace nesy {

NodeId exactly_one(CircuitBuilder& b, std::span<const Var> vars) {
  if (vars.empty()) throw error("exactly_one needs at least one variable");
  std::vector<NodeId> terms;
  for (Var hot : vars) {
    std::vector<NodeId> lits;
    for (Var v : vars) lits.push_back(b.literal({v, v == hot}));
    terms.push_back(b.conjunction(lits));
  }
  return b.disjunction(terms);
}

Circuit exactly_one(std::uint32_t n) {
  if (n == 0) throw error("exactly_one needs at least one variable");
  CircuitBuilder b(n);
  std::vector<Var> vars;
  for (std::uint32_t v = 1; v <= n; ++v) vars.push_back(Var{v});
  return b.build(exactly_one(b, vars), DeterminismClaim::by_construction);
}

namespace {

void add_one_hot(CnfFormula& cnf, const std::vector<Var>& block) {
  Clause at_least;
  for (Var v : block) at_least.push_back({v, true});
  cnf.clauses.push_back(std::move(at_least));
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j) cnf.clauses.push_back({{block[i], false}, {block[j], false}});
}

}  // namespace

CnfFormula total_order(std::uint32_t n) {
  if (n == 0) throw error("total_order needs at least one item");
  CnfFormula cnf;
  cnf.num_vars = n * n;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<Var> row;
    for (std::uint32_t j = 0; j < n; ++j) row.push_back(total_order_var(n, i, j));
    add_one_hot(cnf, row);
  }
  for (std::uint32_t j = 0; j < n; ++j) {
    std::vector<Var> col;
    for (std::uint32_t i = 0; i < n; ++i) col.push_back(total_order_var(n, i, j));
    add_one_hot(cnf, col);
  }
  return cnf;
}

// ---------------------------------------------------------------------------
// Grid paths

GridLayout::GridLayout(const GridSpec& spec) : spec_(spec) {
  if (spec.rows == 0 || spec.cols == 0) throw error("grid dimensions must be positive");
  for (std::uint32_t r = 0; r < spec.rows; ++r) {
    for (std::uint32_t c = 0; c < spec.cols; ++c) {
      std::uint32_t v = r * spec.cols + c;
      if (c + 1 < spec.cols) edges_.emplace_back(v, v + 1);
      if (r + 1 < spec.rows) edges_.emplace_back(v, v + spec.cols);
    }
  }
}

namespace {

using EdgeMask = std::vector<char>;

class PathEnumerator {
public:
  PathEnumerator(const GridLayout& layout, std::size_t cap) : layout_(layout), cap_(cap) {
    adj_.resize(layout.num_vertices());
    for (std::uint32_t e = 0; e < layout.num_edges(); ++e) {
      auto [u, v] = layout.edge(e);
      adj_[u].emplace_back(v, e);
      adj_[v].emplace_back(u, e);
    }
  }

  // paths[t] for every t > s: edge masks of the simple s-t paths.
  std::vector<std::vector<EdgeMask>> from(std::uint32_t s) {
    source_ = s;
    paths_.assign(layout_.num_vertices(), {});
    visited_.assign(layout_.num_vertices(), 0);
    mask_.assign(layout_.num_edges(), 0);
    dfs(s);
    return std::move(paths_);
  }

  std::size_t total() const noexcept { return total_; }

private:
  void dfs(std::uint32_t u) {
    if (u > source_) {
      if (++total_ > cap_) throw limit_error("grid path count exceeds cap " + std::to_string(cap_));
      paths_[u].push_back(mask_);
    }
    visited_[u] = 1;
    for (auto [v, e] : adj_[u]) {
      if (visited_[v]) continue;
      mask_[e] = 1;
      dfs(v);
      mask_[e] = 0;
    }
    visited_[u] = 0;
  }

  const GridLayout& layout_;
  std::size_t cap_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj_;
  std::uint32_t source_ = 0;
  std::vector<std::vector<EdgeMask>> paths_;
  std::vector<char> visited_;
  EdgeMask mask_;
  std::size_t total_ = 0;
};

// Decision trie over edge variables e.. for the sorted masks in [lo, hi).
NodeId edge_trie(CircuitBuilder& b, const GridLayout& layout, const std::vector<EdgeMask>& masks, std::size_t lo,
                 std::size_t hi, std::uint32_t e) {
  if (e == layout.num_edges()) return b.constant(true);
  std::size_t mid = lo;
  while (mid < hi && masks[mid][e] == 0) ++mid;
  Var v = layout.edge_var(e);
  std::vector<NodeId> branches;
  if (mid > lo) branches.push_back(b.conjunction({b.literal({v, false}), edge_trie(b, layout, masks, lo, mid, e + 1)}));
  if (hi > mid) branches.push_back(b.conjunction({b.literal({v, true}), edge_trie(b, layout, masks, mid, hi, e + 1)}));
  return b.disjunction(branches, v);
}

}  // namespace

Circuit grid_simple_paths(const GridSpec& spec) {
  GridLayout layout(spec);
  CircuitBuilder b(layout.num_vars());
  PathEnumerator paths(layout, spec.path_cap);
  std::vector<NodeId> pair_terms;
  for (std::uint32_t s = 0; s < layout.num_vertices(); ++s) {
    auto by_target = paths.from(s);
    for (std::uint32_t t = s + 1; t < layout.num_vertices(); ++t) {
      auto& masks = by_target[t];
      if (masks.empty()) continue;
      std::sort(masks.begin(), masks.end());
      std::vector<NodeId> indicator;
      for (std::uint32_t v = 0; v < layout.num_vertices(); ++v) indicator.push_back(b.literal({layout.vertex_var(v), v == s || v == t}));
      NodeId edges = edge_trie(b, layout, masks, 0, masks.size(), 0);
      pair_terms.push_back(b.conjunction({b.conjunction(indicator), edges}));
    }
  }
  if (pair_terms.empty()) return b.build(b.constant(false), DeterminismClaim::by_construction);
  return b.build(b.disjunction(pair_terms), DeterminismClaim::by_construction);
}

// ---------------------------------------------------------------------------
// Ontology

void validate(const OntologySpec& spec) {
  if (spec.entity_types.empty()) throw error("ontology needs at least one entity type");
  if (spec.slots == 0) throw error("ontology needs at least one slot");
  std::set<std::string> types(spec.entity_types.begin(), spec.entity_types.end());
  if (types.size() != spec.entity_types.size()) throw error("duplicate entity type name");
  std::set<std::string> rels;
  for (const auto& r : spec.relations) {
    if (!rels.insert(r.name).second) throw error("duplicate relation name `" + r.name + "`");
    if (!types.count(r.subject)) throw error("relation `" + r.name + "` references unknown type `" + r.subject + "`");
    if (!types.count(r.object)) throw error("relation `" + r.name + "` references unknown type `" + r.object + "`");
  }
  for (auto [i, j] : spec.pairs) {
    if (i < 1 || i > spec.slots || j < 1 || j > spec.slots)
      throw error("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") outside slots 1.." + std::to_string(spec.slots));
    if (i == j) throw error("pair slots must differ");
  }
}

CnfFormula ontology_constraint(const OntologySpec& spec) {
  validate(spec);
  OntologyLayout layout(spec);
  const auto num_types = static_cast<std::uint32_t>(spec.entity_types.size());
  const auto num_rels = static_cast<std::uint32_t>(spec.relations.size());
  auto type_index = [&](const std::string& name) {
    return static_cast<std::uint32_t>(std::find(spec.entity_types.begin(), spec.entity_types.end(), name) - spec.entity_types.begin());
  };

  CnfFormula cnf;
  cnf.num_vars = layout.num_vars();
  for (std::uint32_t s = 0; s < spec.slots; ++s) {
    std::vector<Var> block;
    for (std::uint32_t t = 0; t < num_types; ++t) block.push_back(layout.type_var(s, t));
    add_one_hot(cnf, block);
  }
  for (std::uint32_t p = 0; p < spec.pairs.size(); ++p) {
    std::vector<Var> block;
    for (std::uint32_t r = 0; r <= num_rels; ++r) block.push_back(layout.relation_var(p, r));
    add_one_hot(cnf, block);
    auto [i, j] = spec.pairs[p];
    for (std::uint32_t r = 0; r < num_rels; ++r) {
      Var rel = layout.relation_var(p, r);
      cnf.clauses.push_back({{rel, false}, {layout.type_var(i - 1, type_index(spec.relations[r].subject)), true}});
      cnf.clauses.push_back({{rel, false}, {layout.type_var(j - 1, type_index(spec.relations[r].object)), true}});
    }
  }
  return cnf;
}

OntologySpec parse_ontology_spec(std::string_view text) {
  OntologySpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto slot_number = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
    }
    if (used != s.size() || v < 0 || v > 1'000'000) throw parse_error("bad count `" + s + "`", lineno);
    return static_cast<std::uint32_t>(v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "type" && tok.size() == 2) {
      spec.entity_types.push_back(tok[1]);
    } else if (tok[0] == "relation" && tok.size() == 4) {
      spec.relations.push_back({tok[1], tok[2], tok[3]});
    } else if (tok[0] == "slots" && tok.size() == 2) {
      spec.slots = slot_number(tok[1]);
    } else if (tok[0] == "pair" && tok.size() == 3) {
      spec.pairs.emplace_back(slot_number(tok[1]), slot_number(tok[2]));
    } else {
      throw parse_error("unrecognized ontology line", lineno);
    }
  }
  try {
    validate(spec);
  } catch (const parse_error&) {
    throw;
  } catch (const error& e) {
    throw parse_error(e.what());
  }
  return spec;
}

}  // namespace nesy
