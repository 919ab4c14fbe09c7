#include "nesy/circuit.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <optional>

namespace nesy {

// ---------------------------------------------------------------------------
// VarSet

std::size_t VarSet::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool VarSet::intersects(const VarSet& other) const {
  for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i)
    if (words_[i] & other.words_[i]) return true;
  return false;
}

VarSet& VarSet::operator|=(const VarSet& other) {
  for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

std::vector<Var> VarSet::minus(const VarSet& other) const {
  std::vector<Var> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i] & ~(i < other.words_.size() ? other.words_[i] : 0);
    while (w) {
      int b = std::countr_zero(w);
      out.push_back(Var{static_cast<std::uint32_t>(i * 64 + b + 1)});
      w &= w - 1;
    }
  }
  return out;
}

std::vector<Var> VarSet::to_vector() const { return minus(VarSet{}); }

// ---------------------------------------------------------------------------
// Builder

std::size_t CircuitBuilder::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.kind) * 0x9e3779b97f4a7c15ull;
  auto mix = [&](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  mix(static_cast<std::size_t>(static_cast<unsigned>(k.lit)));
  mix(k.decision);
  for (NodeId c : k.children) mix(c);
  return h;
}

NodeId CircuitBuilder::intern(NodeKind kind, Literal lit, Var decision, std::vector<NodeId> children) {
  Key key{kind, kind == NodeKind::literal ? lit.to_dimacs() : 0, decision.index, std::move(children)};
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  auto id = static_cast<NodeId>(kinds_.size());
  kinds_.push_back(kind);
  lits_.push_back(kind == NodeKind::literal ? lit : Literal{});
  decisions_.push_back(decision);
  children_.push_back(key.children);
  table_.emplace(std::move(key), id);
  return id;
}

void CircuitBuilder::check_children(std::span<const NodeId> children) const {
  for (NodeId c : children)
    if (c >= kinds_.size()) throw error("child node " + std::to_string(c) + " not yet defined");
}

NodeId CircuitBuilder::constant(bool value) {
  return intern(value ? NodeKind::constant_true : NodeKind::constant_false, {}, {}, {});
}

NodeId CircuitBuilder::literal(Literal lit) {
  if (!lit.var.valid() || lit.var.index > num_vars_)
    throw error("literal " + std::to_string(lit.to_dimacs()) + " outside 1.." + std::to_string(num_vars_));
  return intern(NodeKind::literal, lit, {}, {});
}

NodeId CircuitBuilder::conjunction(std::span<const NodeId> children) {
  check_children(children);
  std::vector<NodeId> kept;
  for (NodeId c : children) {
    if (kinds_[c] == NodeKind::constant_false) return constant(false);
    if (kinds_[c] != NodeKind::constant_true) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) return constant(true);
  NodeId acc = kept.back();
  for (std::size_t i = kept.size() - 1; i-- > 0;) acc = intern(NodeKind::and_gate, {}, {}, {kept[i], acc});
  return acc;
}

NodeId CircuitBuilder::disjunction(std::span<const NodeId> children, Var decision) {
  if (children.empty()) throw error("disjunction needs at least one child");
  check_children(children);
  std::vector<NodeId> kept;
  for (NodeId c : children)
    if (kinds_[c] != NodeKind::constant_false) kept.push_back(c);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) return constant(false);
  if (kept.size() == 1) return kept.front();
  return intern(NodeKind::or_gate, {}, decision, std::move(kept));
}

NodeId CircuitBuilder::decision(Var v, NodeId hi, NodeId lo) {
  NodeId a = conjunction({literal({v, true}), hi});
  NodeId b = conjunction({literal({v, false}), lo});
  return disjunction({a, b}, v);
}

Circuit CircuitBuilder::build(NodeId root, DeterminismClaim claim) const {
  if (root >= kinds_.size()) throw error("root node not defined");
  std::vector<char> live(root + 1, 0);
  live[root] = 1;
  for (NodeId id = root + 1; id-- > 0;)
    if (live[id])
      for (NodeId c : children_[id]) live[c] = 1;

  Circuit out;
  out.num_vars_ = num_vars_;
  std::vector<NodeId> remap(root + 1, 0);
  for (NodeId id = 0; id <= root; ++id) {
    if (!live[id]) continue;
    remap[id] = static_cast<NodeId>(out.kinds_.size());
    out.kinds_.push_back(kinds_[id]);
    out.lits_.push_back(lits_[id]);
    out.decisions_.push_back(decisions_[id]);
    VarSet vars(num_vars_);
    if (kinds_[id] == NodeKind::literal) vars.insert(lits_[id].var);
    for (NodeId c : children_[id]) {
      out.children_.push_back(remap[c]);
      vars |= out.varsets_[remap[c]];
    }
    out.offsets_.push_back(static_cast<std::uint32_t>(out.children_.size()));
    out.varsets_.push_back(std::move(vars));
  }

  out.props_.decomposable = check_decomposable(out).ok;
  out.props_.smooth = check_smooth(out).ok;
  if (claim == DeterminismClaim::by_construction) out.props_.deterministic = true;
  if (claim == DeterminismClaim::certify) out.props_.deterministic = certify_determinism(out).ok;
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks

StructureReport check_decomposable(const Circuit& c) {
  StructureReport r;
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    if (n.kind != NodeKind::and_gate) continue;
    VarSet seen(c.num_vars());
    for (NodeId ch : n.children) {
      if (seen.intersects(c.variables(ch))) {
        r.ok = false;
        r.violations.push_back(id);
        break;
      }
      seen |= c.variables(ch);
    }
  }
  return r;
}

StructureReport check_smooth(const Circuit& c) {
  StructureReport r;
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    if (n.kind != NodeKind::or_gate) continue;
    for (NodeId ch : n.children) {
      if (!(c.variables(ch) == c.variables(id))) {
        r.ok = false;
        r.violations.push_back(id);
        break;
      }
    }
  }
  return r;
}

namespace {

// Literals every model of `id` must satisfy, read off the AND spine.
const std::vector<Literal>& forced_literals(const Circuit& c, NodeId id, std::vector<std::optional<std::vector<Literal>>>& memo) {
  if (memo[id]) return *memo[id];
  std::vector<Literal> out;
  auto n = c.node(id);
  if (n.kind == NodeKind::literal) {
    out.push_back(n.lit);
  } else if (n.kind == NodeKind::and_gate) {
    for (NodeId ch : n.children) {
      const auto& sub = forced_literals(c, ch, memo);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end(), [](Literal a, Literal b) {
      return a.var.index != b.var.index ? a.var.index < b.var.index : a.positive < b.positive;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  memo[id] = std::move(out);
  return *memo[id];
}

bool complementary(const std::vector<Literal>& a, const std::vector<Literal>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].var.index < b[j].var.index) {
      ++i;
    } else if (b[j].var.index < a[i].var.index) {
      ++j;
    } else {
      if (a[i].positive != b[j].positive) return true;
      ++i;
      ++j;
    }
  }
  return false;
}

}  // namespace

StructureReport certify_determinism(const Circuit& c) {
  StructureReport r;
  std::vector<std::optional<std::vector<Literal>>> memo(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    if (n.kind != NodeKind::or_gate) continue;
    bool ok = true;
    for (std::size_t i = 0; ok && i < n.children.size(); ++i)
      for (std::size_t j = i + 1; ok && j < n.children.size(); ++j)
        ok = complementary(forced_literals(c, n.children[i], memo), forced_literals(c, n.children[j], memo));
    if (!ok) {
      r.ok = false;
      r.violations.push_back(id);
    }
  }
  return r;
}

bool check_topological(const Circuit& c) {
  for (NodeId id = 0; id < c.size(); ++id)
    for (NodeId ch : c.node(id).children)
      if (ch >= id) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Smoothing

Circuit smooth(const Circuit& c) {
  if (!c.properties().decomposable) throw computation_error("smoothing requires a decomposable circuit");
  CircuitBuilder b(c.num_vars());
  std::vector<NodeId> gadget(c.num_vars() + 1, 0);
  std::vector<char> have_gadget(c.num_vars() + 1, 0);
  auto gadget_block = [&](const std::vector<Var>& missing) {
    std::vector<NodeId> parts;
    for (Var v : missing) {
      if (!have_gadget[v.index]) {
        gadget[v.index] = b.disjunction({b.literal({v, true}), b.literal({v, false})}, v);
        have_gadget[v.index] = 1;
      }
      parts.push_back(gadget[v.index]);
    }
    return b.conjunction(parts);
  };

  std::vector<NodeId> map(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: map[id] = b.constant(false); break;
      case NodeKind::constant_true: map[id] = b.constant(true); break;
      case NodeKind::literal: map[id] = b.literal(n.lit); break;
      case NodeKind::and_gate: {
        std::vector<NodeId> ch;
        for (NodeId x : n.children) ch.push_back(map[x]);
        map[id] = b.conjunction(ch);
        break;
      }
      case NodeKind::or_gate: {
        std::vector<NodeId> ch;
        for (NodeId x : n.children) {
          auto missing = c.variables(id).minus(c.variables(x));
          ch.push_back(missing.empty() ? map[x] : b.conjunction({map[x], gadget_block(missing)}));
        }
        map[id] = b.disjunction(ch, n.decision);
        break;
      }
    }
  }

  VarSet all(c.num_vars());
  for (std::uint32_t v = 1; v <= c.num_vars(); ++v) all.insert(Var{v});
  NodeId root = map[c.root()];
  auto missing = all.minus(c.variables(c.root()));
  if (!missing.empty()) root = b.conjunction({root, gadget_block(missing)});
  return b.build(root, c.properties().deterministic ? DeterminismClaim::by_construction : DeterminismClaim::none);
}

// ---------------------------------------------------------------------------
// NNF I/O

namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long to_int(std::string_view t, std::size_t lineno) {
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) throw parse_error("expected integer, got `" + std::string(t) + "`", lineno);
  return v;
}

}  // namespace

Circuit read_nnf(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> lines;
  std::size_t lineno = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    auto toks = tokens_of(text.substr(start, end - start));
    if (!toks.empty() && toks[0] != "c") lines.emplace_back(lineno, std::move(toks));
    start = end + 1;
  }
  if (lines.empty()) throw parse_error("empty NNF input");
  const auto& [hline, header] = lines.front();
  if (header.size() != 4 || header[0] != "nnf") throw parse_error("malformed header, expected `nnf <nodes> <edges> <vars>`", hline);
  long long num_nodes = to_int(header[1], hline), num_edges = to_int(header[2], hline), num_vars = to_int(header[3], hline);
  if (num_nodes <= 0 || num_edges < 0 || num_vars < 0) throw parse_error("bad header counts", hline);
  if (static_cast<long long>(lines.size()) - 1 != num_nodes)
    throw parse_error("header declares " + std::to_string(num_nodes) + " nodes, found " + std::to_string(lines.size() - 1));

  CircuitBuilder b(static_cast<std::uint32_t>(num_vars));
  std::vector<NodeId> ids;
  long long edges = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [ln, t] = lines[k];
    auto child_list = [&, ln = ln](std::size_t first, long long count) {
      if (count < 0 || static_cast<long long>(t.size() - first) != count)
        throw parse_error("child count does not match listed children", ln);
      std::vector<NodeId> ch;
      for (std::size_t i = first; i < t.size(); ++i) {
        long long ref = to_int(t[i], ln);
        if (ref < 0 || ref >= static_cast<long long>(ids.size()))
          throw parse_error("reference to node " + std::to_string(ref) + " not defined on an earlier line", ln);
        ch.push_back(ids[static_cast<std::size_t>(ref)]);
      }
      edges += count;
      return ch;
    };
    if (t[0] == "L") {
      if (t.size() != 2) throw parse_error("expected `L <lit>`", ln);
      long long lit = to_int(t[1], ln);
      if (lit == 0 || lit > num_vars || -lit > num_vars) throw parse_error("literal out of range", ln);
      ids.push_back(b.literal(Literal::from_dimacs(static_cast<int>(lit))));
    } else if (t[0] == "A") {
      if (t.size() < 2) throw parse_error("expected `A <c> <ids...>`", ln);
      auto ch = child_list(2, to_int(t[1], ln));
      ids.push_back(b.conjunction(ch));
    } else if (t[0] == "O") {
      if (t.size() < 3) throw parse_error("expected `O <j> <c> <ids...>`", ln);
      long long j = to_int(t[1], ln);
      if (j < 0 || j > num_vars) throw parse_error("decision variable out of range", ln);
      auto ch = child_list(3, to_int(t[2], ln));
      ids.push_back(ch.empty() ? b.constant(false) : b.disjunction(ch, Var{static_cast<std::uint32_t>(j)}));
    } else {
      throw parse_error("unknown node type `" + std::string(t[0]) + "`", ln);
    }
  }
  if (edges != num_edges)
    throw parse_error("header declares " + std::to_string(num_edges) + " edges, found " + std::to_string(edges));
  return b.build(ids.back(), DeterminismClaim::certify);
}

std::string write_nnf(const Circuit& c) {
  std::string out = "nnf " + std::to_string(c.size()) + " " + std::to_string(c.num_edges()) + " " + std::to_string(c.num_vars()) + "\n";
  for (NodeId id = 0; id < c.size(); ++id) {
    auto n = c.node(id);
    switch (n.kind) {
      case NodeKind::constant_false: out += "O 0 0\n"; continue;
      case NodeKind::constant_true: out += "A 0\n"; continue;
      case NodeKind::literal: out += "L " + std::to_string(n.lit.to_dimacs()) + "\n"; continue;
      case NodeKind::and_gate: out += "A " + std::to_string(n.children.size()); break;
      case NodeKind::or_gate: out += "O " + std::to_string(n.decision.index) + " " + std::to_string(n.children.size()); break;
    }
    for (NodeId ch : n.children) out += " " + std::to_string(ch);
    out += "\n";
  }
  return out;
}

}  // namespace nesy
