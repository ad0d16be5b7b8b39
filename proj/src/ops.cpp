#include "tgram/ops.hpp"

#include <algorithm>

#include "tgram/compare.hpp"
#include "tgram/error.hpp"

namespace tgram {

namespace {

/// Copies every terminal of `from` into `to` by name; returns the id map.
std::vector<Id> copy_terminals(const SymbolTable& from, Grammar& to) {
  std::vector<Id> map(from.size(), no_id);
  for (Id id = 1; id < from.size(); ++id) {
    const Symbol& s = from[id];
    if (s.kind == SymbolKind::function) map[id] = to.declare_function(s.name, s.arity);
    if (s.kind == SymbolKind::variable || s.kind == SymbolKind::context_variable) {
      map[id] = to.declare_variable(s.name, s.arity);
    }
  }
  return map;
}

}  // namespace

PreGrammar build_pre(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  PreGrammar out;
  Grammar& p = out.grammar;
  std::vector<Id> term = copy_terminals(t, p);
  out.P.assign(t.size(), no_id);
  out.L.assign(t.size(), no_id);
  out.R.assign(t.size(), no_id);
  std::vector<Id> nts = g.nonterminals();
  for (Id id : nts) {
    if (t.kind(id) == SymbolKind::term_nt) {
      out.P[id] = p.declare_unique("P_" + t.name(id), SymbolKind::word_nt);
    } else if (t.kind(id) == SymbolKind::context_nt) {
      out.L[id] = p.declare_unique("L_" + t.name(id), SymbolKind::word_nt);
      out.R[id] = p.declare_unique("R_" + t.name(id), SymbolKind::word_nt);
    }
  }
  // term arguments may be constants or free variables
  auto pw = [&](Id a) { return t.is_terminal(a) ? term[a] : out.P[a]; };
  for (Id id : nts) {
    RuleView v = g.view(id);
    SymbolKind k = t.kind(id);
    if (k == SymbolKind::word_nt) continue;
    if (k == SymbolKind::term_nt) {
      std::vector<Id> w;
      switch (v.shape) {
        case Shape::apply:
          w.push_back(term[v.head]);
          for (Id a : v.args) w.push_back(pw(a));
          break;
        case Shape::ctx_apply: w = {out.L[v.head], pw(v.second()), out.R[v.head]}; break;
        case Shape::alias: w = {pw(v.head)}; break;
        default: fail(ErrorCode::invalid_argument, "bad term rule for '" + t.name(id) + "'");
      }
      p.define(out.P[id], Rule::word(std::move(w)));
      continue;
    }
    std::vector<Id> l, r;
    switch (v.shape) {
      case Shape::hole: break;
      case Shape::compose:
        l = {out.L[v.head], out.L[v.second()]};
        r = {out.R[v.second()], out.R[v.head]};
        break;
      case Shape::apply: {
        std::uint32_t ci = g.context_arg(v);
        l.push_back(term[v.head]);
        for (std::uint32_t j = 1; j < ci; ++j) l.push_back(pw(v.args[j - 1]));
        l.push_back(out.L[v.args[ci - 1]]);
        r.push_back(out.R[v.args[ci - 1]]);
        for (std::size_t j = ci; j < v.args.size(); ++j) r.push_back(pw(v.args[j]));
        break;
      }
      default: fail(ErrorCode::invalid_argument, "bad context rule for '" + t.name(id) + "'");
    }
    p.define(out.L[id], Rule::word(std::move(l)));
    p.define(out.R[id], Rule::word(std::move(r)));
  }
  return out;
}

HoleGrammar build_hole(const Grammar& g) {
  const SymbolTable& t = g.symbols();
  HoleGrammar out;
  Grammar& h = out.grammar;
  std::uint32_t m = 0;
  for (Id id = 1; id < t.size(); ++id) {
    if (t.kind(id) == SymbolKind::function) m = std::max(m, t.arity(id));
  }
  out.digit.assign(m + 1, no_id);
  for (std::uint32_t i = 1; i <= m; ++i) out.digit[i] = h.declare_function("d" + std::to_string(i), 0);
  out.H.assign(t.size(), no_id);
  std::vector<Id> nts = g.nonterminals();
  for (Id id : nts) {
    if (t.kind(id) == SymbolKind::context_nt) out.H[id] = h.declare_unique("H_" + t.name(id), SymbolKind::word_nt);
  }
  for (Id id : nts) {
    if (t.kind(id) != SymbolKind::context_nt) continue;
    RuleView v = g.view(id);
    std::vector<Id> w;
    if (v.shape == Shape::compose) {
      w = {out.H[v.head], out.H[v.second()]};
    } else if (v.shape == Shape::apply) {
      std::uint32_t ci = g.context_arg(v);
      w = {out.digit[ci], out.H[v.args[ci - 1]]};
    }
    h.define(out.H[id], Rule::word(std::move(w)));
  }
  return out;
}

// ---- extensions

Id Extender::make(SymbolKind kind, Rule rule, Id target) {
  ++added_;
  if (target != no_id) {
    g_.bind(target, std::move(rule));
    return target;
  }
  return g_.add_rule(kind == SymbolKind::context_nt ? "C" : "A", kind, std::move(rule));
}

Id Extender::empty_hole() {
  if (empty_ == no_id) empty_ = make(SymbolKind::context_nt, Rule::hole());
  return empty_;
}

Id Extender::kext(Id n, count_t k) {
  if (k < 1 || k > g_.word_size(n)) fail(ErrorCode::index_out_of_range, "preorder index out of range");
  struct Frame {
    Id id;
    count_t k;
    Id wrap_with;  // second component of a context application, or no_id
  };
  std::vector<Frame> frames;
  Id result = no_id;
  Id cur = n;
  count_t kk = k;
  while (true) {
    auto hit = kext_memo_.find({cur, kk});
    if (hit != kext_memo_.end()) {
      result = hit->second;
      break;
    }
    if (kk == 1) {
      result = cur;
      break;
    }
    RuleView v = g_.view(cur);
    switch (v.shape) {
      case Shape::apply: {
        count_t off = 1;
        Id next = no_id;
        for (Id a : v.args) {
          count_t s = g_.word_size(a);
          if (kk <= off + s) {
            next = a;
            break;
          }
          off += s;
        }
        TGRAM_ASSERT(next != no_id, "kext index beyond the rule");
        frames.push_back({cur, kk, no_id});
        cur = next;
        kk -= off;
        break;
      }
      case Shape::alias:
        frames.push_back({cur, kk, no_id});
        cur = v.head;
        break;
      case Shape::ctx_apply:
      case Shape::compose: {
        Id c1 = v.head, second = v.second();
        count_t l = g_.left_size(c1);
        count_t s2 = g_.word_size(second);
        if (kk <= l) {
          frames.push_back({cur, kk, second});
          cur = c1;
        } else if (kk <= l + s2) {
          frames.push_back({cur, kk, no_id});
          cur = second;
          kk -= l;
        } else {
          frames.push_back({cur, kk, no_id});
          cur = c1;
          kk = kk - s2 + 1;
        }
        break;
      }
      default: fail(ErrorCode::undefined_extension, "kext undefined at '" + g_.name(cur) + "'");
    }
  }
  for (auto f = frames.rbegin(); f != frames.rend(); ++f) {
    if (f->wrap_with != no_id && g_.kind(result) == SymbolKind::context_nt) {
      bool ctx = g_.kind(f->wrap_with) == SymbolKind::context_nt;
      result = make(ctx ? SymbolKind::context_nt : SymbolKind::term_nt,
                    ctx ? Rule::compose(result, f->wrap_with) : Rule::ctx_apply(result, f->wrap_with));
    }
    kext_memo_[{f->id, f->k}] = result;
  }
  return result;
}

Id Extender::pref(Id c, count_t l) {
  if (g_.kind(c) != SymbolKind::context_nt) fail(ErrorCode::invalid_argument, "pref needs a context");
  if (l > g_.hole_depth(c)) fail(ErrorCode::hole_path_exceeded, "hole path is shorter than requested");
  struct Frame {
    Id id;
    count_t l;
    bool compose;  // true: C1 (result); false: apply with arg replaced
  };
  std::vector<Frame> frames;
  Id cur = c;
  count_t ll = l;
  Id result;
  while (true) {
    auto hit = pref_memo_.find({cur, ll});
    if (hit != pref_memo_.end()) {
      result = hit->second;
      break;
    }
    if (ll == 0) {
      result = empty_hole();
      break;
    }
    if (ll == g_.hole_depth(cur)) {
      result = cur;
      break;
    }
    RuleView v = g_.view(cur);
    if (v.shape == Shape::compose) {
      count_t h1 = g_.hole_depth(v.head);
      if (ll == h1) {
        result = v.head;
        break;
      }
      if (ll > h1) {
        frames.push_back({cur, ll, true});
        cur = v.second();
        ll -= h1;
      } else {
        frames.push_back({cur, ll, true});
        cur = v.head;
      }
    } else if (v.shape == Shape::apply) {
      frames.push_back({cur, ll, false});
      cur = v.args[g_.context_arg(v) - 1];
      ll -= 1;
    } else {
      TGRAM_ASSERT(false, "pref reached a hole early");
    }
  }
  for (auto f = frames.rbegin(); f != frames.rend(); ++f) {
    RuleView v = g_.view(f->id);
    if (v.shape == Shape::compose) {
      if (f->l > g_.hole_depth(v.head)) result = make(SymbolKind::context_nt, Rule::compose(v.head, result));
    } else {
      std::uint32_t ci = g_.context_arg(v);
      std::vector<Id> args(v.args.begin(), v.args.end());
      args[ci - 1] = result;
      result = make(SymbolKind::context_nt, Rule::apply(v.head, std::move(args)));
    }
    pref_memo_[{f->id, f->l}] = result;
  }
  return result;
}

Id Extender::suff(Id c, count_t l) {
  if (g_.kind(c) != SymbolKind::context_nt) fail(ErrorCode::invalid_argument, "suff needs a context");
  if (l > g_.hole_depth(c)) fail(ErrorCode::hole_path_exceeded, "hole path is shorter than requested");
  std::vector<std::pair<Id, count_t>> frames;
  Id cur = c;
  count_t ll = l;
  Id result;
  while (true) {
    auto hit = suff_memo_.find({cur, ll});
    if (hit != suff_memo_.end()) {
      result = hit->second;
      break;
    }
    if (ll == 0) {
      result = cur;
      break;
    }
    if (ll == g_.hole_depth(cur)) {
      result = empty_hole();
      break;
    }
    RuleView v = g_.view(cur);
    frames.emplace_back(cur, ll);
    if (v.shape == Shape::compose) {
      count_t h1 = g_.hole_depth(v.head);
      if (ll < h1) {
        cur = v.head;
      } else {
        cur = v.second();
        ll -= h1;
      }
    } else if (v.shape == Shape::apply) {
      cur = v.args[g_.context_arg(v) - 1];
      ll -= 1;
    } else {
      TGRAM_ASSERT(false, "suff reached a hole early");
    }
  }
  for (auto f = frames.rbegin(); f != frames.rend(); ++f) {
    RuleView v = g_.view(f->first);
    if (v.shape == Shape::compose && f->second < g_.hole_depth(v.head)) {
      result = make(SymbolKind::context_nt, Rule::compose(result, v.second()));
    }
    suff_memo_[*f] = result;
  }
  return result;
}

Id Extender::hole_node(Id c, count_t l) const {
  if (l >= g_.hole_depth(c)) fail(ErrorCode::hole_path_exceeded, "no node at that hole depth");
  Id cur = c;
  while (true) {
    RuleView v = g_.view(cur);
    if (v.shape == Shape::compose) {
      count_t h1 = g_.hole_depth(v.head);
      if (l < h1) {
        cur = v.head;
      } else {
        cur = v.second();
        l -= h1;
      }
    } else if (v.shape == Shape::apply) {
      if (l == 0) return cur;
      cur = v.args[g_.context_arg(v) - 1];
      l -= 1;
    } else {
      TGRAM_ASSERT(false, "hole_node reached a hole");
    }
  }
}

std::uint32_t Extender::hole_step(Id c, count_t l) const { return g_.context_arg(g_.view(hole_node(c, l))); }

std::size_t Extender::common_hole_prefix(Id c, const Position& p, std::size_t from) const {
  std::size_t n = 0;
  count_t hd = g_.hole_depth(c);
  while (from + n < p.size() && n < hd && hole_step(c, n) == p[from + n]) ++n;
  return n;
}

Id Extender::pcon(Id a, const Position& p) {
  if (!g_.symbols().is_terminal(a) && g_.kind(a) != SymbolKind::term_nt) fail(ErrorCode::invalid_argument, "pcon needs a term");
  // frames are applied bottom-up to the context found at the end of the descent
  struct Frame {
    enum Kind { apply_at, compose_left, split } kind;
    Id head = no_id;
    std::vector<Id> args;
    std::uint32_t at = 0;
    Id c11 = no_id;
  };
  std::vector<Frame> frames;
  Id cur = a;
  std::size_t pos = 0;
  Id result = no_id;
  while (true) {
    if (pos == p.size()) {
      result = empty_hole();
      break;
    }
    if (g_.symbols().is_terminal(cur)) fail(ErrorCode::invalid_position, "position " + to_string(p) + " not in the term");
    RuleView v = g_.view(cur);
    if (v.shape == Shape::alias) {
      cur = v.head;
      continue;
    }
    if (v.shape == Shape::apply) {
      std::uint32_t i = p[pos];
      if (i < 1 || i > v.args.size()) fail(ErrorCode::invalid_position, "position " + to_string(p) + " not in the term");
      frames.push_back({Frame::apply_at, v.head, std::vector<Id>(v.args.begin(), v.args.end()), i, no_id});
      cur = v.args[i - 1];
      ++pos;
      continue;
    }
    TGRAM_ASSERT(v.shape == Shape::ctx_apply, "pcon on a non-term rule");
    Id c1 = v.head, a2 = v.second();
    count_t hd = g_.hole_depth(c1);
    std::size_t l1 = common_hole_prefix(c1, p, pos);
    if (l1 == hd) {
      if (l1 > 0) frames.push_back({Frame::compose_left, c1, {}, 0, no_id});
      cur = a2;
      pos += l1;
      continue;
    }
    if (pos + l1 == p.size()) {
      result = pref(c1, l1);
      break;
    }
    // paths part at hole depth l1 of C1
    Id node = hole_node(c1, l1);
    RuleView nv = g_.view(node);
    std::uint32_t i = g_.context_arg(nv);
    std::uint32_t k = p[pos + l1];
    if (k < 1 || k > nv.args.size()) fail(ErrorCode::invalid_position, "position " + to_string(p) + " not in the term");
    Id c12 = suff(c1, l1 + 1);
    std::vector<Id> args(nv.args.begin(), nv.args.end());
    args[i - 1] = make(SymbolKind::term_nt, Rule::ctx_apply(c12, a2));
    Id c11 = l1 == 0 ? no_id : pref(c1, l1);
    frames.push_back({Frame::split, nv.head, std::move(args), k, c11});
    cur = nv.args[k - 1];
    pos += l1 + 1;
  }
  for (auto f = frames.rbegin(); f != frames.rend(); ++f) {
    switch (f->kind) {
      case Frame::apply_at:
        f->args[f->at - 1] = result;
        result = make(SymbolKind::context_nt, Rule::apply(f->head, std::move(f->args)));
        break;
      case Frame::compose_left: result = make(SymbolKind::context_nt, Rule::compose(f->head, result)); break;
      case Frame::split:
        f->args[f->at - 1] = result;
        result = make(SymbolKind::context_nt, Rule::apply(f->head, std::move(f->args)));
        if (f->c11 != no_id) result = make(SymbolKind::context_nt, Rule::compose(f->c11, result));
        break;
    }
  }
  return result;
}

Id Extender::joint_cg(Id a, Id b, count_t l, Id target, bool canonical) {
  if (a == b) fail(ErrorCode::invalid_argument, "joint context of equal terms");
  std::optional<PreGrammar> pre;
  std::optional<OccurrenceIndex> index;
  const SymbolTable& t = g_.symbols();
  auto same = [&](Id x, Id y) {
    if (x == y || canonical) return x == y;
    if (t.is_terminal(x) || t.is_terminal(y)) {
      if (t.is_terminal(y)) std::swap(x, y);
      return g_.word_size(y) == 1 && derive_term(g_, y).root() == x;
    }
    if (!pre) {
      pre.emplace(build_pre(g_));
      index.emplace(pre->grammar);
    }
    return eq_terms(*pre, *index, x, y);
  };
  struct Frame {
    Id head;
    std::vector<Id> args;
    std::uint32_t at;
  };
  std::vector<Frame> frames;
  Id x = a, y = b;
  for (count_t depth = 0; depth < l; ++depth) {
    if (t.is_terminal(x) || t.is_terminal(y)) fail(ErrorCode::undefined_extension, "joint context undefined: a leaf is reached");
    RuleView u = g_.view(x);
    RuleView w = g_.view(y);
    while (u.shape == Shape::alias) u = g_.view(u.head);
    while (w.shape == Shape::alias) w = g_.view(w.head);
    if (u.shape != Shape::apply || w.shape != Shape::apply) {
      fail(ErrorCode::undefined_extension, "joint context needs plain applications");
    }
    if (u.head != w.head) fail(ErrorCode::undefined_extension, "joint context undefined: root symbols differ");
    std::uint32_t at = 0;
    for (std::size_t j = 0; j < u.args.size(); ++j) {
      if (same(u.args[j], w.args[j])) continue;
      if (at) fail(ErrorCode::undefined_extension, "joint context undefined: two children differ");
      at = static_cast<std::uint32_t>(j + 1);
    }
    if (at == 0) fail(ErrorCode::undefined_extension, "joint context undefined: equal subterms");
    frames.push_back({u.head, std::vector<Id>(u.args.begin(), u.args.end()), at});
    x = u.args[at - 1];
    y = w.args[at - 1];
  }
  Id result = frames.empty() ? make(SymbolKind::context_nt, Rule::hole(), target)
                             : make(SymbolKind::context_nt, Rule::hole());
  for (std::size_t j = frames.size(); j-- > 0;) {
    Frame& f = frames[j];
    f.args[f.at - 1] = result;
    result = make(SymbolKind::context_nt, Rule::apply(f.head, std::move(f.args)), j == 0 ? target : no_id);
  }
  return result;
}

namespace {

template <class F>
Extension extend(const Grammar& g, F&& op) {
  Extension e{g, no_id, 0};
  Extender x(e.grammar);
  e.result = op(x);
  e.added = x.added();
  return e;
}

}  // namespace

Extension kext(const Grammar& g, Id n, count_t k) {
  return extend(g, [&](Extender& x) { return x.kext(n, k); });
}
Extension pref(const Grammar& g, Id c, count_t l) {
  return extend(g, [&](Extender& x) { return x.pref(c, l); });
}
Extension suff(const Grammar& g, Id c, count_t l) {
  return extend(g, [&](Extender& x) { return x.suff(c, l); });
}
Extension pcon(const Grammar& g, Id a, const Position& p) {
  return extend(g, [&](Extender& x) { return x.pcon(a, p); });
}
Extension joint_cg(const Grammar& g, Id a, Id b, count_t l) {
  return extend(g, [&](Extender& x) { return x.joint_cg(a, b, l, no_id, is_dag(g)); });
}

std::size_t joint_cgf(Grammar& g, Id f, Id a, Id b, count_t l, bool canonical) {
  if (!g.symbols().is_context_variable(f)) fail(ErrorCode::invalid_argument, "'" + g.name(f) + "' is not a free context variable");
  Extender x(g);
  x.joint_cg(a, b, l, f, canonical);
  return x.added();
}

void bind_var(Grammar& g, Id x, Id a) {
  if (!g.symbols().is_first_order_variable(x)) fail(ErrorCode::invalid_argument, "'" + g.name(x) + "' is not a free variable");
  const SymbolTable& t = g.symbols();
  bool leaf = t.is_terminal(a) && a != hole_id && t.arity(a) == 0;
  if (!leaf && g.kind(a) != SymbolKind::term_nt) fail(ErrorCode::invalid_argument, "binding target must be a term");
  if (occurs_terminal(g, x, a)) fail(ErrorCode::occurs_violation, "'" + g.name(x) + "' occurs in its binding");
  g.bind(x, leaf ? Rule::apply(a, {}) : Rule::alias(a));
}

}  // namespace tgram
