#include "tgram/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tgram/error.hpp"

namespace tgram {

struct Grammar::Cache {
  std::vector<SymbolStats> stats;
  std::vector<std::uint8_t> state;  // 0 unknown, 1 on stack, 2 done
};

Grammar::Grammar() : rules_(1), cache_(std::make_unique<Cache>()) {}

Grammar::Grammar(const Grammar& o)
    : table_(o.table_),
      rules_(o.rules_),
      rule_count_(o.rule_count_),
      extra_(o.extra_),
      cache_(std::make_unique<Cache>(*o.cache_)) {}

Grammar& Grammar::operator=(const Grammar& o) {
  if (this != &o) {
    table_ = o.table_;
    rules_ = o.rules_;
    rule_count_ = o.rule_count_;
    extra_ = o.extra_;
    cache_ = std::make_unique<Cache>(*o.cache_);
  }
  return *this;
}

Grammar::Grammar(Grammar&&) noexcept = default;
Grammar& Grammar::operator=(Grammar&&) noexcept = default;
Grammar::~Grammar() = default;

void Grammar::grow() { rules_.resize(table_.size()); }

void Grammar::invalidate() {
  cache_->stats.clear();
  cache_->state.clear();
}

Id Grammar::declare_function(const std::string& name, std::uint32_t arity) {
  Id id = table_.declare_function(name, arity);
  grow();
  return id;
}

Id Grammar::declare_variable(const std::string& name, std::uint32_t arity) {
  Id id = table_.declare_variable(name, arity);
  grow();
  return id;
}

Id Grammar::declare_nonterminal(const std::string& name, SymbolKind kind) {
  Id id = table_.declare_nonterminal(name, kind);
  grow();
  return id;
}

Id Grammar::declare_unique(const std::string& base, SymbolKind kind) {
  if (table_.find(base) == no_id && is_valid_identifier(base)) return declare_nonterminal(base, kind);
  return fresh(is_valid_identifier(base) ? base : std::string("N"), kind);
}

Id Grammar::fresh(std::string_view prefix, SymbolKind kind) {
  Id id = table_.fresh_nonterminal(prefix, kind);
  grow();
  return id;
}

void Grammar::define(Id nt, Rule rule) {
  if (nt >= table_.size() || table_.is_terminal(nt)) {
    fail(ErrorCode::invalid_argument, "rule for a terminal");
  }
  grow();
  if (rules_[nt].shape != Shape::none) {
    extra_.emplace_back(nt, std::move(rule));
    return;
  }
  if (rule.shape == Shape::none) fail(ErrorCode::invalid_argument, "empty rule");
  rules_[nt] = std::move(rule);
  ++rule_count_;
  if (nt < cache_->state.size() && cache_->state[nt] != 0) invalidate();
}

Id Grammar::add_rule(std::string_view prefix, SymbolKind kind, Rule rule) {
  Id id = fresh(prefix, kind);
  define(id, std::move(rule));
  return id;
}

void Grammar::replace_rule(Id nt, Rule rule) {
  if (!has_rule(nt)) fail(ErrorCode::invalid_argument, "no rule to replace for '" + table_.name(nt) + "'");
  if (rule.shape == Shape::none) fail(ErrorCode::invalid_argument, "empty rule");
  rules_[nt] = std::move(rule);
  invalidate();
}

void Grammar::bind(Id variable, Rule rule) {
  table_.make_nonterminal(variable);
  define(variable, std::move(rule));
  invalidate();
}

const Rule& Grammar::rule(Id id) const {
  if (!has_rule(id)) fail(ErrorCode::invalid_argument, "no rule for '" + table_.name(id) + "'");
  return rules_[id];
}

RuleView Grammar::view(Id id) const {
  const Rule& r = rule(id);
  RuleView v{r.shape, r.head, std::span<const Id>(r.args)};
  if (r.shape == Shape::apply && r.head < table_.size() && table_.is_nonterminal(r.head)) {
    SymbolKind hk = table_.kind(r.head);
    if (hk == SymbolKind::term_nt && r.args.empty()) {
      v.shape = Shape::alias;
    } else if (hk == SymbolKind::context_nt && r.args.size() == 1 && r.args[0] < table_.size()) {
      v.shape = table_.kind(r.args[0]) == SymbolKind::context_nt ? Shape::compose : Shape::ctx_apply;
    }
  }
  return v;
}

std::vector<Id> Grammar::nonterminals() const {
  std::vector<Id> out;
  for (Id i = 0; i < rules_.size(); ++i) {
    if (rules_[i].shape != Shape::none) out.push_back(i);
  }
  return out;
}

std::size_t rule_size(const Rule& r) {
  switch (r.shape) {
    case Shape::none: return 0;
    case Shape::apply: return 2 + r.args.size();
    case Shape::hole: return 2;
    case Shape::compose:
    case Shape::ctx_apply: return 3;
    case Shape::alias: return 2;
    case Shape::word: return 1 + r.args.size();
  }
  return 0;
}

count_t Grammar::size() const {
  count_t s = 0;
  for (const auto& r : rules_) s += rule_size(r);
  return s;
}

std::uint32_t Grammar::depth() const {
  std::uint32_t d = 0;
  for (Id i = 0; i < rules_.size(); ++i) {
    if (rules_[i].shape != Shape::none) d = std::max(d, depth(i));
  }
  return d;
}

std::uint32_t Grammar::context_arg(const RuleView& v) const {
  for (std::size_t j = 0; j < v.args.size(); ++j) {
    if (v.args[j] < table_.size() && table_.kind(v.args[j]) == SymbolKind::context_nt) {
      return static_cast<std::uint32_t>(j + 1);
    }
  }
  return 0;
}

namespace {

void view_children(const Grammar& g, const RuleView& v, std::vector<Id>& out) {
  const SymbolTable& t = g.symbols();
  switch (v.shape) {
    case Shape::apply:
    case Shape::word:
      for (Id a : v.args) {
        if (a < t.size() && t.is_nonterminal(a)) out.push_back(a);
      }
      break;
    case Shape::compose:
    case Shape::ctx_apply:
      out.push_back(v.head);
      // a bound context variable may be applied to a constant or free variable
      if (v.args[0] < t.size() && t.is_nonterminal(v.args[0])) out.push_back(v.args[0]);
      break;
    case Shape::alias: out.push_back(v.head); break;
    default: break;
  }
}

count_t plus_minus1(count_t a, count_t b) {
  count_t s = sat_add(a, b);
  return saturated(s) ? s : s - 1;
}

}  // namespace

std::vector<Id> children(const Grammar& g, Id nt) {
  std::vector<Id> out;
  view_children(g, g.view(nt), out);
  return out;
}

const SymbolStats& Grammar::stats(Id id) const {
  if (id >= table_.size()) fail(ErrorCode::invalid_argument, "unknown symbol id");
  if (id >= cache_->state.size() || cache_->state[id] != 2) compute(id);
  return cache_->stats[id];
}

void Grammar::compute(Id root) const {
  Cache& c = *cache_;
  if (c.state.size() < table_.size()) {
    c.state.resize(table_.size(), 0);
    c.stats.resize(table_.size());
  }
  std::vector<Id> stack{root};
  std::vector<Id> kids;
  const SymbolStats leaf{1, 0, 0, 0, 0};
  try {
    while (!stack.empty()) {
      Id id = stack.back();
      if (c.state[id] == 2) {
        stack.pop_back();
        continue;
      }
      if (table_.is_terminal(id)) {
        c.stats[id] = SymbolStats{1, 0, 0, 0, 0};
        c.state[id] = 2;
        stack.pop_back();
        continue;
      }
      RuleView v = view(id);
      kids.clear();
      view_children(*this, v, kids);
      bool ready = true;
      for (Id k : kids) {
        if (c.state[k] == 2) continue;
        if (c.state[k] == 1) fail(ErrorCode::internal, "internal: recursive grammar at '" + table_.name(k) + "'");
        ready = false;
        stack.push_back(k);
      }
      if (!ready) {
        c.state[id] = 1;
        continue;
      }
      SymbolStats s;
      std::uint32_t d = 0;
      for (Id k : kids) d = std::max(d, c.stats[k].depth);
      s.depth = d + 1;
      switch (v.shape) {
        case Shape::apply: {
          std::uint32_t ci = table_.kind(id) == SymbolKind::context_nt ? context_arg(v) : 0;
          s.size = 1;
          count_t h = 0;
          for (std::size_t j = 0; j < v.args.size(); ++j) {
            // constants and free variables appear as arguments without stats
            const SymbolStats& a = table_.is_terminal(v.args[j]) ? leaf : c.stats[v.args[j]];
            s.size = sat_add(s.size, a.size);
            h = std::max(h, sat_add(a.height, 1));
            if (ci && j + 1 < ci) s.left = sat_add(s.left, a.size);
          }
          s.height = h;
          if (ci) {
            const SymbolStats& a = c.stats[v.args[ci - 1]];
            s.hole_depth = sat_add(a.hole_depth, 1);
            s.left = sat_add(sat_add(s.left, 1), a.left);
          }
          break;
        }
        case Shape::hole: s.size = 1; break;
        case Shape::compose: {
          const SymbolStats& a = c.stats[v.head];
          const SymbolStats& b = c.stats[v.args[0]];
          s.size = plus_minus1(a.size, b.size);
          s.height = std::max(a.height, sat_add(a.hole_depth, b.height));
          s.hole_depth = sat_add(a.hole_depth, b.hole_depth);
          s.left = sat_add(a.left, b.left);
          break;
        }
        case Shape::ctx_apply: {
          const SymbolStats& a = c.stats[v.head];
          const SymbolStats& b = table_.is_terminal(v.args[0]) ? leaf : c.stats[v.args[0]];
          s.size = plus_minus1(a.size, b.size);
          s.height = std::max(a.height, sat_add(a.hole_depth, b.height));
          break;
        }
        case Shape::alias: {
          std::uint32_t keep = s.depth;
          s = c.stats[v.head];
          s.depth = keep;
          break;
        }
        case Shape::word:
          for (Id a : v.args) s.size = sat_add(s.size, a < table_.size() && table_.is_terminal(a) ? 1 : c.stats[a].size);
          break;
        case Shape::none: break;
      }
      c.stats[id] = s;
      c.state[id] = 2;
      stack.pop_back();
    }
  } catch (...) {
    for (auto& st : c.state) {
      if (st == 1) st = 0;
    }
    throw;
  }
}

// ---- validation and traversal

std::vector<Id> topo_order(const Grammar& g) {
  std::vector<std::uint8_t> color(g.symbol_count(), 0);
  std::vector<Id> order;
  std::vector<std::pair<Id, std::size_t>> stack;
  std::vector<std::vector<Id>> kids_of(g.symbol_count());
  for (Id root : g.nonterminals()) {
    if (color[root]) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    kids_of[root] = children(g, root);
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& kids = kids_of[id];
      if (next < kids.size()) {
        Id k = kids[next++];
        if (!g.has_rule(k)) continue;
        if (color[k] == 1) fail(ErrorCode::internal, "internal: recursive grammar at '" + g.name(k) + "'");
        if (color[k] == 0) {
          color[k] = 1;
          kids_of[k] = children(g, k);
          stack.emplace_back(k, 0);
        }
        continue;
      }
      color[id] = 2;
      order.push_back(id);
      kids_of[id].clear();
      kids_of[id].shrink_to_fit();
      stack.pop_back();
    }
  }
  return order;
}

namespace {

ValidationReport violation(const Grammar& g, Id id, const std::string& what) {
  return ValidationReport{false, what + (id == no_id ? "" : " (rule of '" + g.name(id) + "')"), id};
}

bool is_kind(const Grammar& g, Id id, SymbolKind k) { return id < g.symbol_count() && g.kind(id) == k; }

}  // namespace

ValidationReport validate(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  for (Id id = 0; id < t.size(); ++id) {
    if (t.is_nonterminal(id) && !g.has_rule(id)) return violation(g, id, "non-terminal without rule");
  }
  if (!g.extra_definitions().empty()) {
    return violation(g, g.extra_definitions().front().first, "singleton breach: non-terminal defined twice");
  }
  for (Id id : g.nonterminals()) {
    RuleView v = g.view(id);
    SymbolKind k = t.kind(id);
    auto bad = [&](const std::string& w) { return violation(g, id, w); };
    for (Id a : v.args) {
      if (a >= t.size()) return bad("unknown symbol");
    }
    if (v.head != no_id && v.head >= t.size()) return bad("unknown symbol");
    if (k == SymbolKind::word_nt) {
      if (v.shape != Shape::word) return bad("word non-terminal with a tree rule");
      for (Id a : v.args) {
        if (a == hole_id) return bad("hole inside a word");
        if (t.is_nonterminal(a) && t.kind(a) != SymbolKind::word_nt) return bad("tree non-terminal inside a word");
      }
      continue;
    }
    if (v.shape == Shape::word) return bad("word rule for a tree non-terminal");
    if (v.shape == Shape::apply) {
      if (v.head == hole_id || t.is_nonterminal(v.head)) return bad("bad head symbol");
      if (t.arity(v.head) != v.args.size()) return bad("arity mismatch");
      std::size_t nctx = 0;
      for (Id a : v.args) {
        if (is_kind(g, a, SymbolKind::context_nt)) {
          ++nctx;
        } else if (!is_kind(g, a, SymbolKind::term_nt) && !(t.is_terminal(a) && a != hole_id && t.arity(a) == 0)) {
          return bad("argument is not a tree non-terminal");
        }
      }
      if (k == SymbolKind::term_nt && nctx != 0) return bad("context argument in a term rule");
      if (k == SymbolKind::context_nt && nctx != 1) return bad("context rule needs exactly one context argument");
      continue;
    }
    if (k == SymbolKind::term_nt) {
      if (v.shape == Shape::ctx_apply) {
        Id arg = v.args[0];
        bool leaf_arg = t.is_terminal(arg) && arg != hole_id && t.arity(arg) == 0;
        if (!is_kind(g, v.head, SymbolKind::context_nt) || !(is_kind(g, arg, SymbolKind::term_nt) || leaf_arg)) {
          return bad("kind mismatch in context application");
        }
      } else if (v.shape == Shape::alias) {
        if (!is_kind(g, v.head, SymbolKind::term_nt)) return bad("kind mismatch in lambda rule");
      } else {
        return bad("shape not allowed for a term non-terminal");
      }
    } else if (k == SymbolKind::context_nt) {
      if (v.shape == Shape::compose) {
        if (!is_kind(g, v.head, SymbolKind::context_nt) || !is_kind(g, v.args[0], SymbolKind::context_nt)) {
          return bad("kind mismatch in composition");
        }
      } else if (v.shape != Shape::hole) {
        return bad("shape not allowed for a context non-terminal");
      }
    }
  }
  try {
    (void)topo_order(g);
  } catch (const Error& e) {
    std::string msg = e.what();
    auto q = msg.find('\'');
    Id at = no_id;
    if (q != std::string::npos) at = t.find(msg.substr(q + 1, msg.rfind('\'') - q - 1));
    return ValidationReport{false, "recursion through '" + (at == no_id ? std::string("?") : t.name(at)) + "'", at};
  }
  return {};
}

bool is_dag(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  for (Id id : g.nonterminals()) {
    if (t.kind(id) != SymbolKind::term_nt) return false;
    RuleView v = g.view(id);
    if (v.shape != Shape::apply || t.is_nonterminal(v.head)) return false;
  }
  return true;
}

namespace {

template <class Pred>
std::vector<char> presence(const Grammar& g, Pred pred) {
  std::vector<char> has(g.symbol_count(), 0);
  const SymbolTable& t = g.symbols();
  for (Id id = 0; id < t.size(); ++id) {
    if (t.is_terminal(id)) has[id] = pred(id) ? 1 : 0;
  }
  for (Id id : topo_order(g)) {
    RuleView v = g.view(id);
    char h = 0;
    if (v.shape == Shape::apply && pred(v.head)) h = 1;
    if (v.shape == Shape::hole && pred(hole_id)) h = 1;
    for (Id a : v.args) h |= has[a];
    if (!h) {
      std::vector<Id> kids;
      view_children(g, v, kids);
      for (Id k : kids) h |= has[k];
    }
    has[id] = h;
  }
  return has;
}

}  // namespace

bool occurs_terminal(const Grammar& g, Id alpha, Id n) {
  if (g.symbols().is_terminal(n)) return n == alpha;
  // only walk what n reaches
  std::vector<Id> reach = reachable(g, {n});
  std::vector<char> has(g.symbol_count(), 0);
  std::vector<char> in(g.symbol_count(), 0);
  for (Id r : reach) in[r] = 1;
  for (Id id : topo_order(g)) {
    if (!in[id]) continue;
    RuleView v = g.view(id);
    char h = 0;
    if (v.shape == Shape::apply && v.head == alpha) h = 1;
    if (v.shape == Shape::hole && alpha == hole_id) h = 1;
    std::vector<Id> kids;
    for (Id a : v.args) h |= (a == alpha) ? 1 : 0;
    view_children(g, v, kids);
    for (Id k : kids) h |= has[k];
    has[id] = h;
  }
  return has[n];
}

std::vector<char> variable_presence(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  return presence(g, [&](Id id) { return t.is_free_variable(id); });
}

bool is_ground(const Grammar& g, Id n) { return !variable_presence(g)[n]; }

Heights heights(const Grammar& g, Id n) {
  Heights h;
  h.height = g.height(n);
  if (g.kind(n) == SymbolKind::context_nt) h.hole_depth = g.hole_depth(n);
  return h;
}

// ---- derivation

ExplicitTerm derive_term(const Grammar& g, Id n, count_t max_size) {
  SymbolKind k = g.kind(n);
  if (k != SymbolKind::term_nt && k != SymbolKind::context_nt) {
    if (g.symbols().is_terminal(n) && g.symbols().arity(n) == 0) return ExplicitTerm::constant(n);
    fail(ErrorCode::invalid_argument, "'" + g.name(n) + "' does not generate a term or context");
  }
  count_t size = g.word_size(n);
  if (size > max_size) throw SizeLimitExceeded(size, max_size);

  struct Item {
    Id id;
    std::int64_t filler;
  };
  std::vector<Item> fillers;
  std::vector<Item> stack{{n, -1}};
  std::vector<ExplicitTerm::Node> out;
  out.reserve(static_cast<std::size_t>(size));
  const SymbolTable& t = g.symbols();
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (t.is_terminal(it.id)) {
      out.push_back({it.id, 0});
      continue;
    }
    RuleView v = g.view(it.id);
    switch (v.shape) {
      case Shape::apply:
        out.push_back({v.head, static_cast<std::uint32_t>(v.args.size())});
        for (std::size_t j = v.args.size(); j-- > 0;) {
          Id a = v.args[j];
          stack.push_back({a, t.kind(a) == SymbolKind::context_nt ? it.filler : -1});
        }
        break;
      case Shape::hole:
        if (it.filler < 0) {
          out.push_back({hole_id, 0});
        } else {
          stack.push_back(fillers[static_cast<std::size_t>(it.filler)]);
        }
        break;
      case Shape::compose:
      case Shape::ctx_apply:
        fillers.push_back({v.args[0], it.filler});
        stack.push_back({v.head, static_cast<std::int64_t>(fillers.size() - 1)});
        break;
      case Shape::alias: stack.push_back({v.head, it.filler}); break;
      default: fail(ErrorCode::invalid_argument, "word rule inside a tree derivation");
    }
  }
  return ExplicitTerm(std::move(out));
}

std::vector<Id> derive_word(const Grammar& g, Id n, count_t max_size) {
  const SymbolTable& t = g.symbols();
  if (t.is_terminal(n)) return {n};
  if (g.kind(n) != SymbolKind::word_nt) fail(ErrorCode::invalid_argument, "'" + g.name(n) + "' is not a word non-terminal");
  count_t size = g.word_size(n);
  if (size > max_size) throw SizeLimitExceeded(size, max_size);
  std::vector<Id> out;
  out.reserve(static_cast<std::size_t>(size));
  std::vector<Id> stack{n};
  while (!stack.empty()) {
    Id id = stack.back();
    stack.pop_back();
    if (t.is_terminal(id)) {
      out.push_back(id);
      continue;
    }
    const Rule& r = g.rule(id);
    for (std::size_t j = r.args.size(); j-- > 0;) stack.push_back(r.args[j]);
  }
  return out;
}

std::vector<Id> reachable(const Grammar& g, const std::vector<Id>& roots) {
  std::vector<char> seen(g.symbol_count(), 0);
  std::vector<Id> stack;
  for (Id r : roots) {
    if (g.symbols().is_nonterminal(r) && !seen[r]) {
      seen[r] = 1;
      stack.push_back(r);
    }
  }
  std::vector<Id> kids;
  while (!stack.empty()) {
    Id id = stack.back();
    stack.pop_back();
    if (!g.has_rule(id)) continue;
    kids.clear();
    view_children(g, g.view(id), kids);
    for (Id k : kids) {
      if (!seen[k]) {
        seen[k] = 1;
        stack.push_back(k);
      }
    }
  }
  std::vector<Id> out;
  for (Id i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.push_back(i);
  }
  return out;
}

Restricted restriction(const Grammar& g, const std::vector<Id>& roots) {
  const SymbolTable& t = g.symbols();
  std::vector<char> keep(t.size(), 0);
  for (Id r : reachable(g, roots)) keep[r] = 1;
  Restricted out;
  Grammar& h = out.grammar;
  out.map.emplace(hole_id, hole_id);
  std::vector<Id> bound;
  for (Id id = 1; id < t.size(); ++id) {
    const Symbol& s = t[id];
    if (t.is_terminal(id)) {
      Id n = s.kind == SymbolKind::function ? h.declare_function(s.name, s.arity) : h.declare_variable(s.name, s.arity);
      out.map.emplace(id, n);
    } else if (keep[id]) {
      Id n;
      if (s.var != VarSort::none) {
        n = h.declare_variable(s.name, s.var == VarSort::first_order ? 0 : 1);
        bound.push_back(id);
      } else {
        n = h.declare_nonterminal(s.name, s.kind);
      }
      out.map.emplace(id, n);
    }
  }
  auto m = [&](Id x) { return x == no_id ? no_id : out.map.at(x); };
  for (Id id = 1; id < t.size(); ++id) {
    if (!keep[id] || !g.has_rule(id)) continue;
    Rule r = g.rule(id);
    r.head = m(r.head);
    for (auto& a : r.args) a = m(a);
    if (t[id].var != VarSort::none) {
      h.bind(out.map.at(id), std::move(r));
    } else {
      h.define(out.map.at(id), std::move(r));
    }
  }
  return out;
}

std::vector<std::uint32_t> vdepth_all(const Grammar& g, const std::unordered_set<Id>& v) {
  const SymbolTable& t = g.symbols();
  for (Id x : v) {
    if (x >= t.size()) fail(ErrorCode::not_a_lambda_set, "unknown symbol in V");
    if (t.is_terminal(x)) continue;
    if (t.kind(x) != SymbolKind::term_nt || !g.has_rule(x) || g.view(x).shape != Shape::alias) {
      fail(ErrorCode::not_a_lambda_set, "'" + t.name(x) + "' in V has no lambda rule");
    }
  }
  std::vector<std::uint32_t> d(t.size(), 0);
  std::vector<Id> kids;
  for (Id id : topo_order(g)) {
    if (v.contains(id)) continue;
    kids.clear();
    view_children(g, g.view(id), kids);
    std::uint32_t m = 0;
    for (Id k : kids) m = std::max(m, d[k]);
    d[id] = m + 1;
  }
  return d;
}

std::uint32_t vdepth(const Grammar& g, const std::unordered_set<Id>& v, Id n) { return vdepth_all(g, v)[n]; }

Restricted canonical_dag(const Grammar& g) {
  if (!is_dag(g)) fail(ErrorCode::invalid_argument, "canonical_dag needs a dag");
  const SymbolTable& t = g.symbols();
  // classes are keyed by (head, classes of the arguments); a constant or
  // variable used directly as an argument is the class of its leaf rule
  std::map<std::vector<std::int64_t>, std::size_t> classes;
  std::vector<std::int64_t> cls(t.size(), -1);
  struct Class {
    Id first = no_id;  // first non-terminal in the class, or no_id
    Id leaf = no_id;   // terminal of a leaf class
    Id head = no_id;
    std::vector<std::size_t> args;
  };
  std::vector<Class> all;
  auto leaf_class = [&](Id a) {
    auto [it, fresh] = classes.emplace(std::vector<std::int64_t>{static_cast<std::int64_t>(a)}, all.size());
    if (fresh) all.push_back(Class{no_id, a, a, {}});
    return it->second;
  };
  for (Id id : topo_order(g)) {
    const Rule& r = g.rule(id);
    std::vector<std::int64_t> key{static_cast<std::int64_t>(r.head)};
    std::vector<std::size_t> args;
    for (Id a : r.args) {
      std::size_t c = t.is_terminal(a) ? leaf_class(a) : static_cast<std::size_t>(cls[a]);
      args.push_back(c);
      key.push_back(-1 - static_cast<std::int64_t>(c));
    }
    std::size_t c;
    if (args.empty()) {
      c = leaf_class(r.head);
    } else {
      auto [it, fresh] = classes.emplace(std::move(key), all.size());
      if (fresh) all.push_back(Class{no_id, no_id, r.head, std::move(args)});
      c = it->second;
    }
    if (all[c].first == no_id) all[c].first = id;
    cls[id] = static_cast<std::int64_t>(c);
  }
  Restricted out;
  Grammar& h = out.grammar;
  out.map.emplace(hole_id, hole_id);
  for (Id id = 1; id < t.size(); ++id) {
    const Symbol& s = t[id];
    if (!t.is_terminal(id)) continue;
    out.map.emplace(id, s.kind == SymbolKind::function ? h.declare_function(s.name, s.arity)
                                                       : h.declare_variable(s.name, s.arity));
  }
  std::vector<Id> nt(all.size(), no_id);
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (all[c].first != no_id) nt[c] = h.declare_nonterminal(t.name(all[c].first), SymbolKind::term_nt);
  }
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (nt[c] == no_id) nt[c] = h.declare_unique("L_" + t.name(all[c].leaf), SymbolKind::term_nt);
  }
  for (std::size_t c = 0; c < all.size(); ++c) {
    std::vector<Id> args;
    for (std::size_t a : all[c].args) args.push_back(nt[a]);
    h.define(nt[c], Rule::apply(out.map.at(all[c].head), std::move(args)));
  }
  for (Id id = 1; id < t.size(); ++id) {
    if (cls[id] >= 0) out.map.emplace(id, nt[static_cast<std::size_t>(cls[id])]);
  }
  return out;
}

// ---- text format

std::string rule_rhs_to_string(const Grammar& g, const Rule& r) {
  auto n = [&](Id id) -> std::string { return id < g.symbol_count() ? g.name(id) : "?"; };
  std::string out;
  switch (r.shape) {
    case Shape::apply:
      out = n(r.head);
      if (!r.args.empty()) {
        out += '(';
        for (std::size_t j = 0; j < r.args.size(); ++j) {
          if (j) out += ", ";
          out += n(r.args[j]);
        }
        out += ')';
      }
      break;
    case Shape::hole: out = "[]"; break;
    case Shape::compose:
    case Shape::ctx_apply: out = n(r.head) + " " + n(r.args[0]); break;
    case Shape::alias: out = n(r.head); break;
    case Shape::word:
      for (std::size_t j = 0; j < r.args.size(); ++j) {
        if (j) out += ' ';
        out += n(r.args[j]);
      }
      break;
    case Shape::none: break;
  }
  return out;
}

namespace {

const char* kind_keyword(SymbolKind k) {
  switch (k) {
    case SymbolKind::term_nt: return "term";
    case SymbolKind::context_nt: return "ctx";
    case SymbolKind::word_nt: return "word";
    default: return "?";
  }
}

}  // namespace

std::string rule_to_string(const Grammar& g, Id nt) {
  std::string rhs = rule_rhs_to_string(g, g.rule(nt));
  return std::string(kind_keyword(g.kind(nt))) + " " + g.name(nt) + " ->" + (rhs.empty() ? "" : " " + rhs);
}

std::string to_string(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  std::string sig, var;
  for (Id id = 1; id < t.size(); ++id) {
    const Symbol& s = t[id];
    std::string item = " " + s.name + "/" + std::to_string(s.var == VarSort::context ? 1 : s.arity);
    if (s.kind == SymbolKind::function) sig += item;
    if (s.var != VarSort::none) var += item;
  }
  std::string out;
  if (!sig.empty()) out += "sig" + sig + "\n";
  if (!var.empty()) out += "var" + var + "\n";
  for (Id id : g.nonterminals()) out += rule_to_string(g, id) + "\n";
  for (const auto& [id, r] : g.extra_definitions()) {
    std::string rhs = rule_rhs_to_string(g, r);
    out += std::string(kind_keyword(g.kind(id))) + " " + g.name(id) + " ->" + (rhs.empty() ? "" : " " + rhs) + "\n";
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct RuleLine {
  std::size_t line;
  SymbolKind kind;
  std::string lhs;
  std::string rhs;
};

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

std::pair<std::string, std::uint32_t> parse_decl(std::size_t line, const std::string& item) {
  auto slash = item.find('/');
  if (slash == std::string::npos) parse_error(line, "expected name/arity, got '" + item + "'");
  std::string name = item.substr(0, slash);
  std::string ar = item.substr(slash + 1);
  if (ar.empty() || ar.size() > 6 || !std::all_of(ar.begin(), ar.end(), ::isdigit)) {
    parse_error(line, "bad arity in '" + item + "'");
  }
  return {name, static_cast<std::uint32_t>(std::stoul(ar))};
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  std::vector<RuleLine> rules;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    auto sp = line.find_first_of(" \t");
    std::string key = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(std::string_view(line).substr(sp));
    try {
      if (key == "sig" || key == "var") {
        for (const auto& item : split_ws(rest)) {
          auto [name, arity] = parse_decl(lineno, item);
          if (key == "sig") {
            g.declare_function(name, arity);
          } else {
            g.declare_variable(name, arity);
          }
        }
      } else if (key == "term" || key == "ctx" || key == "word") {
        auto arrow = rest.find("->");
        if (arrow == std::string::npos) parse_error(lineno, "expected '->'");
        std::string lhs = trim(std::string_view(rest).substr(0, arrow));
        std::string rhs = trim(std::string_view(rest).substr(arrow + 2));
        if (!is_valid_identifier(lhs)) parse_error(lineno, "bad non-terminal name '" + lhs + "'");
        SymbolKind k = key == "term" ? SymbolKind::term_nt : key == "ctx" ? SymbolKind::context_nt : SymbolKind::word_nt;
        rules.push_back({lineno, k, lhs, rhs});
      } else {
        parse_error(lineno, "unknown keyword '" + key + "'");
      }
    } catch (const Error& e) {
      if (std::string(e.what()).rfind("line ", 0) == 0) throw;
      parse_error(lineno, e.what());
    }
    if (nl == text.size()) break;
  }

  // declare left-hand sides; a declared variable on the left is being bound
  const SymbolTable& t = g.symbols();
  std::vector<char> is_bound(0);
  for (const auto& r : rules) {
    Id id = t.find(r.lhs);
    if (id == no_id) {
      g.declare_nonterminal(r.lhs, r.kind);
      continue;
    }
    if (t.is_free_variable(id)) {
      SymbolKind want = t.is_first_order_variable(id) ? SymbolKind::term_nt : SymbolKind::context_nt;
      if (want != r.kind) parse_error(r.line, "variable '" + r.lhs + "' bound with the wrong kind");
      continue;
    }
    if (t.is_terminal(id)) parse_error(r.line, "'" + r.lhs + "' is a function symbol");
    if (t.kind(id) != r.kind) parse_error(r.line, "'" + r.lhs + "' defined with two kinds");
  }

  auto lookup = [&](std::size_t line, const std::string& name) {
    Id id = t.find(name);
    if (id == no_id) parse_error(line, "unknown symbol '" + name + "'");
    return id;
  };
  std::vector<std::pair<Id, Rule>> pending_binds;
  for (const auto& r : rules) {
    Id lhs = t.find(r.lhs);
    Rule rule;
    if (r.kind == SymbolKind::word_nt) {
      std::vector<Id> seq;
      for (const auto& w : split_ws(r.rhs)) seq.push_back(lookup(r.line, w));
      rule = Rule::word(std::move(seq));
    } else if (r.rhs == "[]") {
      rule = Rule::hole();
    } else if (r.rhs.find('(') != std::string::npos) {
      auto open = r.rhs.find('(');
      auto close = r.rhs.rfind(')');
      if (close == std::string::npos || close < open || trim(std::string_view(r.rhs).substr(close + 1)).size()) {
        parse_error(r.line, "unbalanced parentheses");
      }
      std::string head = trim(std::string_view(r.rhs).substr(0, open));
      std::string inner = r.rhs.substr(open + 1, close - open - 1);
      std::vector<Id> args;
      std::size_t p = 0;
      while (true) {
        auto comma = inner.find(',', p);
        std::string a = trim(std::string_view(inner).substr(p, comma == std::string::npos ? std::string::npos : comma - p));
        if (a.empty()) parse_error(r.line, "empty argument");
        if (a.find_first_of("() \t") != std::string::npos) parse_error(r.line, "arguments must be non-terminal names");
        args.push_back(lookup(r.line, a));
        if (comma == std::string::npos) break;
        p = comma + 1;
      }
      rule = Rule::apply(lookup(r.line, head), std::move(args));
    } else {
      auto parts = split_ws(r.rhs);
      if (parts.size() == 1) {
        Id a = lookup(r.line, parts[0]);
        bool var_nt = t.is_free_variable(a) ? false : t.is_nonterminal(a);
        // a variable that is bound further down is a term non-terminal here
        bool later_bound = false;
        if (t.is_first_order_variable(a)) {
          for (const auto& q : rules) later_bound |= q.lhs == parts[0];
        }
        rule = (var_nt || later_bound) ? Rule::alias(a) : Rule::apply(a, {});
      } else if (parts.size() == 2) {
        Id c = lookup(r.line, parts[0]);
        Id x = lookup(r.line, parts[1]);
        bool x_ctx = t.kind(x) == SymbolKind::context_nt || t.is_context_variable(x);
        rule = x_ctx ? Rule::compose(c, x) : Rule::ctx_apply(c, x);
      } else {
        parse_error(r.line, "cannot read rule '" + r.rhs + "'");
      }
    }
    if (t.is_free_variable(lhs)) {
      pending_binds.emplace_back(lhs, std::move(rule));
    } else {
      g.define(lhs, std::move(rule));
    }
  }
  for (auto& [v, rule] : pending_binds) {
    if (t.is_free_variable(v)) {
      g.bind(v, std::move(rule));
    } else {
      g.define(v, std::move(rule));
    }
  }
  return g;
}

Grammar load_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

bool same_grammar(const Grammar& a, const Grammar& b) {
  const SymbolTable& ta = a.symbols();
  const SymbolTable& tb = b.symbols();
  if (ta.size() != tb.size() || a.rule_count() != b.rule_count()) return false;
  for (Id id = 1; id < ta.size(); ++id) {
    Id o = tb.find(ta.name(id));
    if (o == no_id) return false;
    const Symbol& sa = ta[id];
    const Symbol& sb = tb[o];
    if (sa.kind != sb.kind || sa.arity != sb.arity || sa.var != sb.var) return false;
    if (a.has_rule(id) != b.has_rule(o)) return false;
    if (!a.has_rule(id)) continue;
    const Rule& ra = a.rule(id);
    const Rule& rb = b.rule(o);
    if (ra.shape != rb.shape || ra.args.size() != rb.args.size()) return false;
    auto nm = [](const SymbolTable& t, Id x) { return x == no_id ? std::string() : t.name(x); };
    if (nm(ta, ra.head) != nm(tb, rb.head)) return false;
    for (std::size_t j = 0; j < ra.args.size(); ++j) {
      if (ta.name(ra.args[j]) != tb.name(rb.args[j])) return false;
    }
  }
  return true;
}

}  // namespace tgram
