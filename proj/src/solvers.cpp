#include "tgram/solvers.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tgram/compare.hpp"
#include "tgram/error.hpp"
#include "tgram/ops.hpp"

namespace tgram {

namespace {

/// Free variables heading some rule reachable from roots, by sort.
std::vector<Id> free_variables(const Grammar& g, const std::vector<Id>& roots, SymbolKind sort) {
  const SymbolTable& t = g.symbols();
  std::vector<char> seen(t.size(), 0);
  for (Id id : reachable(g, roots)) {
    RuleView v = g.view(id);
    if (v.head != no_id && v.head < t.size() && t.kind(v.head) == sort) seen[v.head] = 1;
    for (Id a : v.args) {
      if (t.kind(a) == sort) seen[a] = 1;
    }
  }
  std::vector<Id> out;
  for (Id id = 0; id < t.size(); ++id) {
    if (seen[id]) out.push_back(id);
  }
  return out;
}

void require_term(const Grammar& g, Id n, const char* what) {
  if (n >= g.symbol_count() || g.kind(n) != SymbolKind::term_nt || !g.has_rule(n)) {
    fail(ErrorCode::invalid_argument, std::string(what) + " must be a term non-terminal");
  }
}

/// The base-grammar symbol that a preorder-grammar terminal stands for.
Id base_symbol(const Grammar& base, const PreGrammar& pre, Id sym) {
  Id id = base.symbols().find(pre.grammar.name(sym));
  TGRAM_ASSERT(id != no_id, "preorder terminal without a base symbol");
  return id;
}

}  // namespace

FirstOrderResult unify_stg(const Grammar& g, Id as, Id at) {
  require_term(g, as, "left side");
  require_term(g, at, "right side");
  if (!free_variables(g, {as, at}, SymbolKind::context_variable).empty()) {
    fail(ErrorCode::invalid_argument, "unification does not take context variables");
  }
  FirstOrderResult r;
  r.grammar = g;
  Grammar& G = r.grammar;
  r.variables = free_variables(G, {as, at}, SymbolKind::variable);
  std::size_t m = G.rule_count();
  std::size_t n = G.depth();
  r.stats.rules_before = m;
  r.stats.bound = m + r.variables.size() * n;
  while (true) {
    ++r.stats.iterations;
    if (as == at) {
      r.solvable = true;
      break;
    }
    PreGrammar pre = build_pre(G);
    OccurrenceIndex index(pre.grammar);
    Diff d = index.first_diff(pre.P[as], pre.P[at]);
    r.stats.occurrence_queries += index.queries();
    if (d.kind == Diff::Kind::equal) {
      r.solvable = true;
      break;
    }
    TGRAM_ASSERT(d.kind == Diff::Kind::index, "preorders of terms cannot be proper prefixes");
    Id a = base_symbol(G, pre, index.char_at(pre.P[as], d.index));
    Id b = base_symbol(G, pre, index.char_at(pre.P[at], d.index));
    TGRAM_ASSERT(a != b, "first difference on equal symbols");
    const SymbolTable& t = G.symbols();
    if (!t.is_first_order_variable(a) && !t.is_first_order_variable(b)) {
      r.reason = "clash";
      break;
    }
    Id x = t.is_first_order_variable(a) ? a : b;
    Id other = x == a ? at : as;
    Extender ext(G);
    Id sub = ext.kext(other, d.index);
    if (occurs_terminal(G, x, sub)) {
      r.reason = "occurs";
      break;
    }
    bind_var(G, x, sub);
    ++r.stats.rule_applications;
  }
  r.stats.rules_after = G.rule_count();
  TGRAM_ASSERT(r.stats.rules_after <= r.stats.bound, "unification grammar outgrew m + |V| n");
  return r;
}

FirstOrderResult match_stg(const Grammar& g, Id as, Id at) {
  require_term(g, as, "pattern");
  require_term(g, at, "target");
  if (!free_variables(g, {as}, SymbolKind::context_variable).empty()) {
    fail(ErrorCode::invalid_argument, "first-order matching does not take context variables");
  }
  if (!free_variables(g, {at}, SymbolKind::variable).empty() ||
      !free_variables(g, {at}, SymbolKind::context_variable).empty()) {
    fail(ErrorCode::invalid_argument, "matching target must be ground");
  }
  FirstOrderResult r;
  r.grammar = g;
  Grammar& G = r.grammar;
  r.variables = free_variables(G, {as}, SymbolKind::variable);
  std::size_t m = G.rule_count();
  r.stats.rules_before = m;
  r.stats.bound = m + r.variables.size() * G.depth();
  bool no_match = false;
  for (std::size_t round = 0; round < r.variables.size(); ++round) {
    ++r.stats.iterations;
    PreGrammar pre = build_pre(G);
    OccurrenceIndex index(pre.grammar);
    std::optional<count_t> k = index.first_var_index(pre.P[as]);
    r.stats.occurrence_queries += index.queries();
    if (!k) break;
    if (*k > index.length(pre.P[at])) {
      no_match = true;
      break;
    }
    Id x = base_symbol(G, pre, index.char_at(pre.P[as], *k));
    Extender ext(G);
    bind_var(G, x, ext.kext(at, *k));
    ++r.stats.rule_applications;
  }
  if (!no_match) {
    PreGrammar pre = build_pre(G);
    OccurrenceIndex index(pre.grammar);
    r.solvable = eq_terms(pre, index, as, at);
    r.stats.occurrence_queries += index.queries();
  }
  if (!r.solvable) r.reason = "no-match";
  r.stats.rules_after = G.rule_count();
  TGRAM_ASSERT(r.stats.rules_after <= r.stats.bound, "matching grammar outgrew m + |V| n");
  return r;
}

Substitution read_substitution(const Grammar& g, const std::vector<Id>& variables, count_t max_size) {
  Substitution s;
  for (Id v : variables) {
    if (g.has_rule(v)) s.emplace(v, derive_term(g, v, max_size));
  }
  return s;
}

// ---- k-context matching

namespace {

struct Eq {
  enum Kind : std::uint8_t { nt, app, ctxapp };
  Kind kind = nt;
  Id head = no_id;            // nt: A; app: symbol; ctxapp: C
  std::vector<Id> args;       // app arguments
  std::uint32_t ctx = 0;      // app: 1-based index of the context argument
  Id inner = no_id;           // term filling the context (app with ctx, ctxapp)
  Id rhs = no_id;

  std::vector<Id> key() const {
    std::vector<Id> k{static_cast<Id>(kind), head, ctx, inner, rhs};
    k.insert(k.end(), args.begin(), args.end());
    return k;
  }
};

Eq nt_eq(Id a, Id b) { return Eq{Eq::nt, a, {}, 0, no_id, b}; }
Eq ctx_eq(Id c, Id a, Id b) { return Eq{Eq::ctxapp, c, {}, 0, a, b}; }

struct State {
  Grammar g;
  std::deque<Eq> queue;
  std::vector<Eq> stuck;  // F(A) = B with F free
  std::set<std::vector<Id>> memo;
  std::vector<ContextConstraint> gamma;
};

enum class Outcome { failed, solved, stuck };

class Engine {
 public:
  Engine(const Grammar& g0, count_t L, SolverStats& stats) : L_(L), stats_(stats) {
    std::vector<char> vars = variable_presence(g0);
    ground_.assign(g0.symbol_count(), 0);
    for (Id id : g0.nonterminals()) ground_[id] = !vars[id];
  }

  Outcome run(State& s) {
    while (!s.queue.empty()) {
      Eq e = std::move(s.queue.front());
      s.queue.pop_front();
      normalize(s.g, e);
      if (e.kind == Eq::nt && e.head == e.rhs) continue;
      if (!s.memo.insert(e.key()).second) continue;
      ++stats_.rule_applications;
      if (!step(s, e)) return Outcome::failed;
    }
    return s.stuck.empty() ? Outcome::solved : Outcome::stuck;
  }

  /// Children of a stuck state, one per guess of the first applicable rule.
  std::vector<State> branch(State& s) {
    const SymbolTable& t = s.g.symbols();
    std::vector<Id> order;
    std::map<Id, std::vector<std::size_t>> by_var;
    for (std::size_t i = 0; i < s.stuck.size(); ++i) {
      Id f = s.stuck[i].head;
      if (!by_var.count(f)) order.push_back(f);
      by_var[f].push_back(i);
    }
    auto in_arg = [&](Id f, const Eq& e) { return occurs_terminal(s.g, f, e.args[0]); };
    std::vector<State> out;

    // two equations for F with different targets fix F up to its hole depth
    for (Id f : order) {
      const auto& idx = by_var[f];
      for (std::size_t j = 1; j < idx.size(); ++j) {
        Id b1 = s.stuck[idx[0]].rhs, b2 = s.stuck[idx[j]].rhs;
        if (b1 == b2) continue;
        for (count_t l = 0; l <= L_; ++l) add_joint(s, out, f, b1, b2, l);
        return out;
      }
    }
    // F only heads equations with one target: it is some context of B above B'
    for (Id f : order) {
      const auto& idx = by_var[f];
      bool alone = std::none_of(s.stuck.begin(), s.stuck.end(), [&](const Eq& e) { return in_arg(f, e); });
      if (!alone) continue;
      Id b = s.stuck[idx[0]].rhs;
      for (Id b2 : reachable(s.g, {b})) {
        if (t.kind(b2) != SymbolKind::term_nt) continue;
        State c = s;
        std::vector<Eq> keep;
        for (auto& e : c.stuck) {
          if (e.head == f) {
            c.queue.push_back(nt_eq(e.args[0], b2));
          } else {
            keep.push_back(std::move(e));
          }
        }
        c.stuck = std::move(keep);
        c.gamma.push_back({f, b, b2});
        out.push_back(std::move(c));
      }
      return out;
    }
    // F(A) = B with F inside A
    for (const Eq& e : s.stuck) {
      if (!in_arg(e.head, e)) continue;
      add_hole(s, out, e.head);
      for (Id b2 : reachable(s.g, {e.rhs})) {
        if (b2 == e.rhs || t.kind(b2) != SymbolKind::term_nt) continue;
        for (count_t l = 1; l <= L_; ++l) add_joint(s, out, e.head, e.rhs, b2, l);
      }
      return out;
    }
    // F1(A1) = B1, F2(A2) = B2, F1 inside A2, B1 at least as high as B2
    for (const Eq& e1 : s.stuck) {
      for (const Eq& e2 : s.stuck) {
        if (e1.head == e2.head || !in_arg(e1.head, e2)) continue;
        if (s.g.height(e1.rhs) < s.g.height(e2.rhs)) continue;
        add_hole(s, out, e2.head);
        add_joint(s, out, e1.head, e1.rhs, e1.rhs, 0);
        for (Id b2 : reachable(s.g, {e2.rhs})) {
          if (b2 == e2.rhs || t.kind(b2) != SymbolKind::term_nt) continue;
          for (count_t l = 1; l <= L_; ++l) add_joint(s, out, e1.head, e1.rhs, b2, l);
        }
        return out;
      }
    }
    TGRAM_ASSERT(false, "no rule applies to a non-solved triple");
  }

 private:
  void normalize(const Grammar& g, Eq& e) const {
    if (e.kind == Eq::app && g.symbols().is_nonterminal(e.head)) {
      // a variable bound since the equation was made
      if (e.args.empty()) {
        e = nt_eq(e.head, e.rhs);
      } else {
        e = ctx_eq(e.head, e.args[0], e.rhs);
      }
    }
  }

  bool step(State& s, const Eq& e) {
    Grammar& g = s.g;
    const SymbolTable& t = g.symbols();
    switch (e.kind) {
      case Eq::nt: {
        if (e.head < ground_.size() && ground_[e.head]) return false;  // canonical: distinct ids differ
        RuleView v = g.view(e.head);
        switch (v.shape) {
          case Shape::apply:
            s.queue.push_back(Eq{Eq::app, v.head, std::vector<Id>(v.args.begin(), v.args.end()), 0, no_id, e.rhs});
            break;
          case Shape::alias: s.queue.push_back(nt_eq(v.head, e.rhs)); break;
          case Shape::ctx_apply: s.queue.push_back(ctx_eq(v.head, v.second(), e.rhs)); break;
          default: TGRAM_ASSERT(false, "unexpected term rule");
        }
        return true;
      }
      case Eq::ctxapp: {
        RuleView v = g.view(e.head);
        switch (v.shape) {
          case Shape::hole: s.queue.push_back(nt_eq(e.inner, e.rhs)); break;
          case Shape::apply:
            s.queue.push_back(Eq{Eq::app, v.head, std::vector<Id>(v.args.begin(), v.args.end()),
                                 g.context_arg(v), e.inner, e.rhs});
            break;
          case Shape::compose: {
            Id filled = g.add_rule("T", SymbolKind::term_nt, Rule::ctx_apply(v.second(), e.inner));
            s.queue.push_back(ctx_eq(v.head, filled, e.rhs));
            break;
          }
          default: TGRAM_ASSERT(false, "unexpected context rule");
        }
        return true;
      }
      case Eq::app: {
        if (t.is_first_order_variable(e.head)) {
          bind_var(g, e.head, e.rhs);
          return true;
        }
        if (t.is_context_variable(e.head)) {
          s.stuck.push_back(e);
          return true;
        }
        RuleView w = g.view(e.rhs);
        TGRAM_ASSERT(w.shape == Shape::apply, "right-hand side outside the dag");
        if (w.head != e.head) return false;
        for (std::size_t j = 0; j < e.args.size(); ++j) {
          if (e.ctx == j + 1) {
            s.queue.push_back(ctx_eq(e.args[j], e.inner, w.args[j]));
          } else {
            s.queue.push_back(nt_eq(e.args[j], w.args[j]));
          }
        }
        return true;
      }
    }
    return false;
  }

  static void requeue(State& c, Id f) {
    std::vector<Eq> keep;
    for (auto& e : c.stuck) {
      if (e.head == f) {
        c.queue.push_back(std::move(e));
      } else {
        keep.push_back(std::move(e));
      }
    }
    c.stuck = std::move(keep);
  }

  void add_hole(const State& s, std::vector<State>& out, Id f) {
    State c = s;
    c.g.bind(f, Rule::hole());
    requeue(c, f);
    out.push_back(std::move(c));
  }

  void add_joint(const State& s, std::vector<State>& out, Id f, Id b1, Id b2, count_t l) {
    State c = s;
    if (l == 0) {
      c.g.bind(f, Rule::hole());
    } else {
      try {
        joint_cgf(c.g, f, b1, b2, l);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::undefined_extension) throw;
        return;
      }
    }
    requeue(c, f);
    out.push_back(std::move(c));
  }

  count_t L_;
  SolverStats& stats_;
  std::vector<char> ground_;
};

/// Structural text of what a variable is bound to, down to original
/// non-terminals; equal text means equal binding on a canonical dag.
std::string binding_key(const Grammar& g, Id v, std::size_t original) {
  std::string out;
  std::vector<Id> stack{v};
  while (!stack.empty()) {
    Id id = stack.back();
    stack.pop_back();
    if (id == no_id) {
      out += ')';
      continue;
    }
    if (!g.has_rule(id)) {
      out += "!" + std::to_string(id) + " ";
      continue;
    }
    if (id < original && !g.symbols().was_variable(id)) {
      out += "#" + std::to_string(id) + " ";
      continue;
    }
    RuleView r = g.view(id);
    out += std::to_string(static_cast<int>(r.shape)) + ":" + std::to_string(r.head) + "(";
    stack.push_back(no_id);
    for (std::size_t j = r.args.size(); j-- > 0;) stack.push_back(r.args[j]);
    if (r.shape == Shape::alias || r.shape == Shape::compose || r.shape == Shape::ctx_apply) {
      if (r.head != no_id && g.symbols().is_nonterminal(r.head)) stack.push_back(r.head);
    }
  }
  return out;
}

}  // namespace

KcmdResult kcmd_solve(const KcmdProblem& problem, std::size_t k_max) {
  const Grammar& g = problem.grammar;
  if (!is_dag(g)) fail(ErrorCode::invalid_argument, "context matching needs a dag grammar");
  std::vector<Id> lhs, rhs;
  for (auto [a, b] : problem.equations) {
    require_term(g, a, "pattern");
    require_term(g, b, "target");
    lhs.push_back(a);
    rhs.push_back(b);
  }
  if (!free_variables(g, rhs, SymbolKind::variable).empty() ||
      !free_variables(g, rhs, SymbolKind::context_variable).empty()) {
    fail(ErrorCode::invalid_argument, "targets must be ground");
  }
  std::vector<Id> ctx_vars = free_variables(g, lhs, SymbolKind::context_variable);
  if (ctx_vars.size() > k_max) {
    fail(ErrorCode::too_many_context_variables,
         std::to_string(ctx_vars.size()) + " context variables, limit is " + std::to_string(k_max));
  }
  Restricted canon = canonical_dag(g);
  KcmdResult result;
  State start;
  start.g = canon.grammar;
  count_t L = 0;
  for (Id b : rhs) L = std::max(L, start.g.height(canon.map.at(b)));
  for (auto [a, b] : problem.equations) start.queue.push_back(nt_eq(canon.map.at(a), canon.map.at(b)));

  std::vector<Id> variables;
  for (Id v : free_variables(g, lhs, SymbolKind::variable)) variables.push_back(canon.map.at(v));
  for (Id v : ctx_vars) variables.push_back(canon.map.at(v));
  std::sort(variables.begin(), variables.end());

  const std::size_t original = start.g.symbol_count();
  result.stats.rules_before = start.g.rule_count();
  Engine engine(start.g, L, result.stats);
  std::set<std::string> seen;
  std::vector<State> stack;
  stack.push_back(std::move(start));
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    ++result.stats.iterations;
    Outcome o = engine.run(s);
    if (o == Outcome::failed) continue;
    if (o == Outcome::stuck) {
      std::vector<State> kids = engine.branch(s);
      result.stats.branches += kids.size();
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
      continue;
    }
    ValidationReport rep = validate(s.g);
    TGRAM_ASSERT(rep.ok, "solved grammar invalid: " + rep.message);
    std::string key;
    for (Id v : variables) key += binding_key(s.g, v, original) + "|";
    std::sort(s.gamma.begin(), s.gamma.end(), [](const auto& x, const auto& y) {
      return std::tie(x.variable, x.whole, x.part) < std::tie(y.variable, y.whole, y.part);
    });
    for (const auto& c : s.gamma) {
      key += "G" + std::to_string(c.variable) + "," + std::to_string(c.whole) + "," + std::to_string(c.part);
    }
    if (!seen.insert(key).second) continue;
    result.stats.rules_after = std::max(result.stats.rules_after, s.g.rule_count());
    result.forms.push_back(SolvedForm{std::move(s.g), std::move(s.gamma), variables});
  }
  return result;
}

std::vector<Substitution> enumerate_solutions(const SolvedForm& sf, std::size_t limit, count_t max_size) {
  Substitution base;
  for (Id v : sf.variables) {
    if (sf.grammar.has_rule(v)) base.emplace(v, derive_term(sf.grammar, v, max_size));
  }
  std::vector<std::vector<ExplicitTerm>> options;
  for (const auto& c : sf.gamma) {
    ExplicitTerm whole = derive_term(sf.grammar, c.whole, max_size);
    ExplicitTerm part = derive_term(sf.grammar, c.part, max_size);
    std::vector<ExplicitTerm> opts;
    for (std::size_t i = 0; i < whole.size(); ++i) {
      if (whole.end(i) - i != part.size()) continue;
      if (whole.subtree(i) == part) opts.push_back(prefix_context(whole, position_of(whole, i)));
    }
    if (opts.empty()) return {};
    options.push_back(std::move(opts));
  }
  std::vector<Substitution> out;
  std::vector<std::size_t> choice(options.size(), 0);
  while (out.size() < limit) {
    Substitution s = base;
    for (std::size_t j = 0; j < options.size(); ++j) s[sf.gamma[j].variable] = options[j][choice[j]];
    out.push_back(std::move(s));
    std::size_t j = 0;
    while (j < choice.size() && ++choice[j] == options[j].size()) choice[j++] = 0;
    if (j == choice.size()) break;
  }
  return out;
}

std::vector<Substitution> all_solutions(const KcmdResult& r, const SymbolTable& table, std::size_t limit,
                                        count_t max_size) {
  std::map<std::string, Substitution> uniq;
  for (const auto& sf : r.forms) {
    for (auto& s : enumerate_solutions(sf, limit, max_size)) {
      Substitution t = translate(s, sf.grammar.symbols(), table);
      uniq.emplace(to_string(t, table), std::move(t));
    }
  }
  std::vector<Substitution> out;
  for (auto& [k, s] : uniq) {
    if (out.size() >= limit) break;
    out.push_back(std::move(s));
  }
  return out;
}

// ---- certificates

std::size_t certificate_bound(std::size_t first_order, std::size_t context, std::size_t depth) {
  return first_order * (depth + 1) + context * (2 * depth * depth + 4 * depth + 1);
}

Grammar build_certificate(const Grammar& g, Id as, Id at, const Substitution& sigma, count_t max_size) {
  require_term(g, as, "pattern");
  require_term(g, at, "target");
  const SymbolTable& table = g.symbols();
  ExplicitTerm s = derive_term(g, as, max_size);
  ExplicitTerm t = derive_term(g, at, max_size);
  Grammar out = g;
  Extender ext(out);
  std::map<Id, Id> image;  // variable -> non-terminal generating sigma(variable)
  std::size_t n_fo = 0, n_ctx = 0;
  auto not_found = [&](Id v) {
    fail(ErrorCode::position_not_found, "image of '" + table.name(v) + "' is not found in the target");
  };
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [si, ti] = stack.back();
    stack.pop_back();
    if (ti >= t.size()) fail(ErrorCode::position_not_found, "pattern does not fit the target");
    Id sym = s.symbol(si);
    if (table.is_first_order_variable(sym)) {
      if (!image.count(sym)) {
        image[sym] = ext.kext(at, ti + 1);
        ++n_fo;
      }
      continue;
    }
    if (table.is_context_variable(sym)) {
      auto it = sigma.find(sym);
      if (it == sigma.end()) fail(ErrorCode::invalid_argument, "no image for '" + table.name(sym) + "'");
      Position q = hole_path(it->second);
      if (!image.count(sym)) {
        Id a = ext.kext(at, ti + 1);
        if (!table.is_terminal(a) && g.kind(a) != SymbolKind::term_nt) not_found(sym);
        try {
          image[sym] = ext.pcon(a, q);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::invalid_position) not_found(sym);
          throw;
        }
        ++n_ctx;
      }
      std::size_t tj = ti;
      for (std::uint32_t step : q) {
        if (step < 1 || step > t.arity(tj)) not_found(sym);
        tj = t.child(tj, step);
      }
      stack.emplace_back(s.child(si, 1), tj);
      continue;
    }
    if (t.symbol(ti) != sym) fail(ErrorCode::position_not_found, "pattern does not fit the target");
    for (std::uint32_t j = s.arity(si); j >= 1; --j) stack.emplace_back(s.child(si, j), t.child(ti, j));
  }
  for (auto [v, n] : image) {
    if (table.is_first_order_variable(v)) {
      // kext lands on a constant when the image is a leaf of an application
      out.bind(v, table.is_terminal(n) ? Rule::apply(n, {}) : Rule::alias(n));
    } else {
      out.bind(v, out.rule(n));
    }
  }
  std::size_t added = out.rule_count() - g.rule_count();
  TGRAM_ASSERT(added <= certificate_bound(n_fo, n_ctx, g.depth()), "certificate exceeds its size bound");
  return out;
}

bool verify_certificate(const Grammar& original, const Grammar& extension, const std::string& as,
                        const std::string& at) {
  ValidationReport rep = validate(extension);
  if (!rep.ok) fail(ErrorCode::invalid_extension, "certificate is not a grammar: " + rep.message);
  const SymbolTable& te = extension.symbols();
  for (Id id : original.nonterminals()) {
    Id e = te.find(original.name(id));
    if (e == no_id || !extension.has_rule(e) || te.kind(e) != original.kind(id) ||
        rule_rhs_to_string(original, original.rule(id)) != rule_rhs_to_string(extension, extension.rule(e))) {
      fail(ErrorCode::invalid_extension, "certificate changes the rule of '" + original.name(id) + "'");
    }
  }
  Id a = te.find(as), b = te.find(at);
  if (a == no_id || b == no_id) fail(ErrorCode::invalid_extension, "certificate lacks the problem roots");
  require_term(extension, a, "pattern");
  require_term(extension, b, "target");
  return eq_terms(extension, a, b);
}

// ---- problem files

ProblemFile parse_problem(std::string_view text, const std::string& base_dir) {
  ProblemFile p;
  bool have_grammar = false;
  std::vector<std::pair<std::string, std::string>> eqs;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  auto error = [&](const std::string& what) {
    fail(ErrorCode::parse, "problem line " + std::to_string(lineno) + ": " + what);
  };
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto sp = line.find_first_of(" \t");
    std::string key = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    if (key == "grammar") {
      if (have_grammar) error("second grammar");
      if (rest == "{") {
        std::string block;
        bool closed = false;
        while (std::getline(in, raw)) {
          ++lineno;
          if (trim(raw) == "}") {
            closed = true;
            break;
          }
          block += raw + "\n";
        }
        if (!closed) error("unterminated grammar block");
        p.grammar = parse_grammar(block);
      } else {
        if (rest.empty()) error("grammar needs a path or a block");
        std::filesystem::path path(rest);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        p.grammar = load_grammar(path.string());
      }
      have_grammar = true;
    } else if (key == "kind") {
      if (rest != "unify" && rest != "match" && rest != "cmatch") error("kind must be unify, match or cmatch");
      p.kind = rest;
    } else if (key == "eq") {
      auto eq = rest.find('=');
      if (eq == std::string::npos) error("expected 'eq A = B'");
      eqs.emplace_back(trim(rest.substr(0, eq)), trim(rest.substr(eq + 1)));
    } else {
      error("unknown keyword '" + key + "'");
    }
  }
  if (!have_grammar) fail(ErrorCode::parse, "problem has no grammar");
  if (p.kind.empty()) fail(ErrorCode::parse, "problem has no kind");
  if (eqs.empty()) fail(ErrorCode::parse, "problem has no equation");
  if (p.kind != "cmatch" && eqs.size() != 1) fail(ErrorCode::parse, p.kind + " takes exactly one equation");
  for (auto& [a, b] : eqs) p.equations.emplace_back(p.grammar.symbols().at(a), p.grammar.symbols().at(b));
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace tgram
