#include "tgram/compare.hpp"

#include <algorithm>
#include <random>

#include "tgram/error.hpp"

namespace tgram {

namespace {

constexpr std::uint64_t mod = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & mod);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t r = lo + hi;
  if (r >= mod) r -= mod;
  return r;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  if (r >= mod) r -= mod;
  return r;
}

}  // namespace

OccurrenceIndex::OccurrenceIndex(const Grammar& g, std::uint64_t seed) : g_(g) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(1u << 20, mod - 2);
  b1_ = pick(rng);
  b2_ = pick(rng);
}

std::int64_t OccurrenceIndex::leaf(Id symbol) const {
  if (leaf_.size() <= symbol) leaf_.resize(g_.symbol_count(), -2);
  if (leaf_[symbol] != -2) return leaf_[symbol];
  Node n;
  n.symbol = symbol;
  n.len = 1;
  n.h1 = n.h2 = symbol + 1;
  n.p1 = b1_;
  n.p2 = b2_;
  n.has_var = g_.symbols().is_free_variable(symbol);
  nodes_.push_back(n);
  return leaf_[symbol] = static_cast<std::int64_t>(nodes_.size() - 1);
}

std::int64_t OccurrenceIndex::pair(std::int64_t a, std::int64_t b) const {
  const Node& x = nodes_[a];
  const Node& y = nodes_[b];
  Node n;
  n.left = a;
  n.right = b;
  n.len = sat_add(x.len, y.len);
  n.h1 = addmod(mulmod(x.h1, y.p1), y.h1);
  n.h2 = addmod(mulmod(x.h2, y.p2), y.h2);
  n.p1 = mulmod(x.p1, y.p1);
  n.p2 = mulmod(x.p2, y.p2);
  n.depth = std::max(x.depth, y.depth) + 1;
  n.has_var = x.has_var || y.has_var;
  nodes_.push_back(n);
  return static_cast<std::int64_t>(nodes_.size() - 1);
}

std::int64_t OccurrenceIndex::node_of(Id n) const {
  const SymbolTable& t = g_.symbols();
  if (n >= t.size()) fail(ErrorCode::invalid_argument, "unknown symbol id");
  if (t.is_terminal(n)) {
    if (n == hole_id) fail(ErrorCode::invalid_argument, "hole inside a word");
    return leaf(n);
  }
  if (of_.size() < t.size()) of_.resize(t.size(), -2);
  if (of_[n] != -2) return of_[n];
  std::vector<Id> stack{n};
  std::vector<std::int64_t> parts;
  while (!stack.empty()) {
    Id id = stack.back();
    if (of_[id] >= empty) {
      stack.pop_back();
      continue;
    }
    if (t.kind(id) != SymbolKind::word_nt) {
      fail(ErrorCode::invalid_argument, "'" + t.name(id) + "' is not a word non-terminal");
    }
    const Rule& r = g_.rule(id);
    if (of_[id] == -2) {
      // -3 marks a rule whose children are being computed
      of_[id] = -3;
      for (Id a : r.args) {
        if (!t.is_nonterminal(a)) continue;
        if (of_[a] == -3) fail(ErrorCode::internal, "internal: recursive word grammar");
        if (of_[a] == -2) stack.push_back(a);
      }
      continue;
    }
    parts.clear();
    for (Id a : r.args) {
      std::int64_t x = t.is_terminal(a) ? leaf(a) : of_[a];
      if (x != empty) parts.push_back(x);
    }
    // balanced so normal-form depth stays logarithmic in the rule length
    while (parts.size() > 1) {
      std::size_t w = 0;
      for (std::size_t j = 0; j + 1 < parts.size(); j += 2) parts[w++] = pair(parts[j], parts[j + 1]);
      if (parts.size() % 2) parts[w++] = parts.back();
      parts.resize(w);
    }
    of_[id] = parts.empty() ? empty : parts[0];
    stack.pop_back();
  }
  return of_[n];
}

count_t OccurrenceIndex::length(Id n) const {
  std::int64_t x = node_of(n);
  return x == empty ? 0 : nodes_[x].len;
}

std::uint32_t OccurrenceIndex::cnf_depth(Id n) const {
  std::int64_t x = node_of(n);
  return x == empty ? 0 : nodes_[x].depth;
}

OccurrenceIndex::Hash OccurrenceIndex::range_hash(std::int64_t node, count_t start, count_t len) const {
  Hash acc;
  if (len == 0) return acc;
  struct Item {
    std::int64_t node;
    count_t start, len;
  };
  std::vector<Item> stack{{node, start, len}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Node& n = nodes_[it.node];
    if (it.start == 0 && it.len == n.len) {
      acc.h1 = addmod(mulmod(acc.h1, n.p1), n.h1);
      acc.h2 = addmod(mulmod(acc.h2, n.p2), n.h2);
      acc.p1 = mulmod(acc.p1, n.p1);
      acc.p2 = mulmod(acc.p2, n.p2);
      continue;
    }
    count_t l = nodes_[n.left].len;
    if (it.start + it.len <= l) {
      stack.push_back({n.left, it.start, it.len});
    } else if (it.start >= l) {
      stack.push_back({n.right, it.start - l, it.len});
    } else {
      stack.push_back({n.right, 0, it.start + it.len - l});
      stack.push_back({n.left, it.start, l - it.start});
    }
  }
  return acc;
}

void OccurrenceIndex::extract(std::int64_t node, count_t start, count_t len, std::vector<Id>& out) const {
  struct Item {
    std::int64_t node;
    count_t start, len;
  };
  std::vector<Item> stack{{node, start, len}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.len == 0) continue;
    const Node& n = nodes_[it.node];
    if (n.left < 0) {
      out.push_back(n.symbol);
      continue;
    }
    count_t l = nodes_[n.left].len;
    if (it.start + it.len <= l) {
      stack.push_back({n.left, it.start, it.len});
    } else if (it.start >= l) {
      stack.push_back({n.right, it.start - l, it.len});
    } else {
      stack.push_back({n.right, 0, it.start + it.len - l});
      stack.push_back({n.left, it.start, l - it.start});
    }
  }
}

bool OccurrenceIndex::window_equal(std::int64_t a, count_t sa, std::int64_t b, count_t sb, count_t len) const {
  ++queries_;
  if (len == 0) return true;
  Hash x = range_hash(a, sa, len);
  Hash y = range_hash(b, sb, len);
  if (x.h1 != y.h1 || x.h2 != y.h2) return false;
  if (len > confirm_limit) return true;
  std::vector<Id> u, v;
  u.reserve(static_cast<std::size_t>(len));
  v.reserve(static_cast<std::size_t>(len));
  extract(a, sa, len, u);
  extract(b, sb, len, v);
  return u == v;
}

bool OccurrenceIndex::occurs(Id n1, Id n2, count_t k) const {
  std::int64_t a = node_of(n1);
  std::int64_t b = node_of(n2);
  count_t l1 = a == empty ? 0 : nodes_[a].len;
  count_t l2 = b == empty ? 0 : nodes_[b].len;
  if (k < 1 || sat_add(k - 1, l1) > l2) return false;
  if (l1 == 0) {
    ++queries_;
    return true;
  }
  return window_equal(a, 0, b, k - 1, l1);
}

bool OccurrenceIndex::equal(Id n1, Id n2) const {
  if (n1 == n2) return true;
  return length(n1) == length(n2) && occurs(n1, n2, 1);
}

Id OccurrenceIndex::char_at(Id n, count_t k) const {
  std::int64_t x = node_of(n);
  if (x == empty || k < 1 || k > nodes_[x].len) fail(ErrorCode::index_out_of_range, "index out of range");
  count_t off = k - 1;
  while (nodes_[x].left >= 0) {
    count_t l = nodes_[nodes_[x].left].len;
    if (off < l) {
      x = nodes_[x].left;
    } else {
      off -= l;
      x = nodes_[x].right;
    }
  }
  return nodes_[x].symbol;
}

Diff OccurrenceIndex::first_diff(Id n1, Id n2) const {
  last_diff_queries_ = 0;
  std::int64_t a = node_of(n1);
  std::int64_t b = node_of(n2);
  count_t l1 = a == empty ? 0 : nodes_[a].len;
  count_t l2 = b == empty ? 0 : nodes_[b].len;
  count_t m = std::min(l1, l2);
  Diff d;
  if (l1 == l2 && (m == 0 || window_equal(a, 0, b, 0, m))) return d;
  if (m == 0 || window_equal(a, 0, b, 0, m)) {
    d.kind = Diff::Kind::proper_prefix;
    d.index = m + 1;
    d.first_shorter = l1 < l2;
    return d;
  }
  // left child equal to the aligned window of n2: go right, else go left
  count_t off = 0;
  std::int64_t x = a;
  while (nodes_[x].left >= 0) {
    std::int64_t left = nodes_[x].left;
    count_t ll = nodes_[left].len;
    ++last_diff_queries_;
    if (off + ll <= l2 && window_equal(left, 0, b, off, ll)) {
      off += ll;
      x = nodes_[x].right;
    } else {
      x = left;
    }
  }
  d.kind = Diff::Kind::index;
  d.index = off + 1;
  return d;
}

std::optional<count_t> OccurrenceIndex::first_var_index(Id n) const {
  std::int64_t x = node_of(n);
  if (x == empty || !nodes_[x].has_var) return std::nullopt;
  count_t off = 0;
  while (nodes_[x].left >= 0) {
    std::int64_t left = nodes_[x].left;
    if (nodes_[left].has_var) {
      x = left;
    } else {
      off += nodes_[left].len;
      x = nodes_[x].right;
    }
  }
  return off + 1;
}

OccurrenceIndex build_index(const Grammar& g) { return OccurrenceIndex(g); }

Grammar to_cnf(const Grammar& g, const std::vector<Id>& roots) {
  const SymbolTable& t = g.symbols();
  Grammar out;
  std::vector<Id> map(t.size(), no_id);
  for (Id id = 1; id < t.size(); ++id) {
    const Symbol& s = t[id];
    if (s.kind == SymbolKind::function) map[id] = out.declare_function(s.name, s.arity);
    if (s.kind == SymbolKind::variable || s.kind == SymbolKind::context_variable) {
      map[id] = out.declare_variable(s.name, s.arity);
    }
  }
  std::vector<Id> reach = reachable(g, roots);
  for (Id id : reach) {
    if (t.kind(id) != SymbolKind::word_nt) fail(ErrorCode::invalid_argument, "to_cnf needs a word grammar");
    map[id] = out.declare_nonterminal(t.name(id), SymbolKind::word_nt);
  }
  std::vector<Id> term_nt(t.size(), no_id);
  auto as_nt = [&](Id x) {
    // x is an id of `out`; terminals get a unit non-terminal
    if (out.symbols().is_nonterminal(x)) return x;
    Id& slot = term_nt[x];
    if (slot == no_id) slot = out.add_rule("T_" + out.name(x), SymbolKind::word_nt, Rule::word({x}));
    return slot;
  };
  std::vector<char> nonempty(t.size(), 0);
  std::vector<Id> order;
  for (Id id : topo_order(g)) {
    if (map[id] != no_id && t.is_nonterminal(id)) order.push_back(id);
  }
  for (Id id : order) {
    std::vector<Id> parts;
    for (Id a : g.rule(id).args) {
      if (t.is_terminal(a)) {
        parts.push_back(map[a]);
      } else if (nonempty[a]) {
        parts.push_back(map[a]);
      }
    }
    if (parts.empty()) {
      if (std::find(roots.begin(), roots.end(), id) != roots.end()) {
        fail(ErrorCode::empty_word_rule, "'" + t.name(id) + "' derives the empty word");
      }
      continue;
    }
    nonempty[id] = 1;
    if (parts.size() == 1) {
      Id x = parts[0];
      out.define(map[id], out.symbols().is_terminal(x) ? Rule::word({x}) : out.rule(x));
      continue;
    }
    while (parts.size() > 2) {
      std::size_t w = 0;
      for (std::size_t j = 0; j + 1 < parts.size(); j += 2) {
        parts[w++] = out.add_rule("cnf", SymbolKind::word_nt, Rule::word({as_nt(parts[j]), as_nt(parts[j + 1])}));
      }
      if (parts.size() % 2) parts[w++] = parts.back();
      parts.resize(w);
    }
    out.define(map[id], Rule::word({as_nt(parts[0]), as_nt(parts[1])}));
  }
  // empty non-terminals stay declared only if something still needs them
  Restricted r = restriction(out, [&] {
    std::vector<Id> keep;
    for (Id id : reach) {
      if (nonempty[id]) keep.push_back(map[id]);
    }
    return keep;
  }());
  return r.grammar;
}

bool eq_words(const Grammar& g, Id n1, Id n2) {
  if (n1 == n2) return true;
  if (g.word_size(n1) != g.word_size(n2)) return false;
  OccurrenceIndex index(g);
  return index.equal(n1, n2);
}

bool eq_terms(const PreGrammar& pre, const OccurrenceIndex& index, Id a, Id b) {
  if (a == b) return true;
  if (a >= pre.P.size() || b >= pre.P.size() || pre.P[a] == no_id || pre.P[b] == no_id) {
    fail(ErrorCode::invalid_argument, "eq_terms needs term non-terminals");
  }
  return index.equal(pre.P[a], pre.P[b]);
}

bool eq_terms(const Grammar& g, Id a, Id b) {
  if (a == b) return true;
  if (g.word_size(a) != g.word_size(b)) return false;
  PreGrammar pre = build_pre(g);
  OccurrenceIndex index(pre.grammar);
  return eq_terms(pre, index, a, b);
}

}  // namespace tgram
