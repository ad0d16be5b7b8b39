#include "tgram/generate.hpp"

#include <functional>

#include "tgram/error.hpp"

namespace tgram {

Signature declare_signature(Grammar& g, std::size_t variables, std::size_t context_variables) {
  Signature s;
  for (const char* c : {"a", "b", "c"}) s.constants.push_back(g.declare_function(c, 0));
  s.functions.push_back(g.declare_function("g", 1));
  s.functions.push_back(g.declare_function("f", 2));
  s.functions.push_back(g.declare_function("h", 3));
  for (std::size_t i = 1; i <= variables; ++i) s.variables.push_back(g.declare_variable("x" + std::to_string(i), 0));
  for (std::size_t i = 1; i <= context_variables; ++i) {
    s.context_variables.push_back(g.declare_variable("F" + std::to_string(i), 1));
  }
  return s;
}

ExplicitTerm random_term(Rng& rng, const Signature& sig, const TermShape& shape) {
  std::function<ExplicitTerm(std::size_t)> gen = [&](std::size_t depth) {
    if (depth == 0 || rng.chance(shape.leaf)) {
      if (!sig.variables.empty() && rng.chance(shape.variable)) return ExplicitTerm::constant(rng.pick(sig.variables));
      return ExplicitTerm::constant(rng.pick(sig.constants));
    }
    if (!sig.context_variables.empty() && rng.chance(shape.context)) {
      return ExplicitTerm::apply(rng.pick(sig.context_variables), {gen(depth - 1)});
    }
    Id f = rng.pick(sig.functions);
    std::vector<ExplicitTerm> kids;
    std::uint32_t arity = f == sig.functions[0] ? 1 : f == sig.functions[1] ? 2 : 3;
    for (std::uint32_t j = 0; j < arity; ++j) kids.push_back(gen(depth - 1));
    return ExplicitTerm::apply(f, kids);
  };
  return gen(shape.max_depth);
}

ExplicitTerm random_context(Rng& rng, const Signature& sig, std::size_t max_depth) {
  Signature ground = sig;
  ground.variables.clear();
  ground.context_variables.clear();
  ExplicitTerm t = random_term(rng, ground, TermShape{max_depth, 0.3, 0.0, 0.0});
  return t.replace(rng.uniform(0, t.size() - 1), ExplicitTerm::hole());
}

// ---- encoding

Id Encoder::encode(const ExplicitTerm& t) {
  std::vector<std::uint64_t> keys(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    std::vector<std::uint64_t> k{t.symbol(i)};
    for (std::uint32_t j = 1; j <= t.arity(i); ++j) k.push_back(keys[t.child(i, j)]);
    keys[i] = intern_.emplace(std::move(k), intern_.size()).first->second;
  }
  return node(t, 0, keys);
}

Id Encoder::node(const ExplicitTerm& t, std::size_t i, const std::vector<std::uint64_t>& keys) {
  auto hit = shared_.find(keys[i]);
  if (hit != shared_.end() && rng_.chance(opt_.share)) return hit->second;
  Id result;
  if (!opt_.dag_only && t.arity(i) > 0 && rng_.chance(opt_.context)) {
    std::vector<std::pair<std::size_t, std::uint32_t>> path;
    std::size_t cur = i;
    std::size_t want = rng_.uniform(1, 4);
    while (path.size() < want && t.arity(cur) > 0) {
      auto c = static_cast<std::uint32_t>(rng_.uniform(1, t.arity(cur)));
      path.emplace_back(cur, c);
      cur = t.child(cur, c);
    }
    Id c = context(t, path, 0, path.size(), keys);
    Id a = node(t, cur, keys);
    result = g_.add_rule("A", SymbolKind::term_nt, Rule::ctx_apply(c, a));
  } else {
    std::vector<Id> args;
    for (std::uint32_t j = 1; j <= t.arity(i); ++j) args.push_back(node(t, t.child(i, j), keys));
    result = g_.add_rule("A", SymbolKind::term_nt, Rule::apply(t.symbol(i), std::move(args)));
  }
  if (!opt_.dag_only && rng_.chance(opt_.alias)) result = g_.add_rule("A", SymbolKind::term_nt, Rule::alias(result));
  shared_.emplace(keys[i], result);
  return result;
}

Id Encoder::context(const ExplicitTerm& t, const std::vector<std::pair<std::size_t, std::uint32_t>>& path,
                    std::size_t from, std::size_t to, const std::vector<std::uint64_t>& keys) {
  if (to - from > 1 && rng_.chance(opt_.compose)) {
    std::size_t mid = rng_.uniform(from + 1, to - 1);
    Id left = context(t, path, from, mid, keys);
    Id right = context(t, path, mid, to, keys);
    return g_.add_rule("C", SymbolKind::context_nt, Rule::compose(left, right));
  }
  auto [n, c] = path[from];
  std::vector<Id> args;
  for (std::uint32_t j = 1; j <= t.arity(n); ++j) {
    if (j != c) {
      args.push_back(node(t, t.child(n, j), keys));
    } else if (to - from > 1) {
      args.push_back(context(t, path, from + 1, to, keys));
    } else {
      if (hole_ == no_id) hole_ = g_.add_rule("C", SymbolKind::context_nt, Rule::hole());
      args.push_back(hole_);
    }
  }
  return g_.add_rule("C", SymbolKind::context_nt, Rule::apply(t.symbol(n), std::move(args)));
}

Grammar random_word_grammar(Rng& rng, std::size_t letters, std::size_t rules, count_t max_len) {
  Grammar g;
  std::vector<Id> sigma;
  for (std::size_t i = 0; i < letters; ++i) sigma.push_back(g.declare_function("l" + std::to_string(i), 0));
  std::vector<Id> nts;
  std::vector<count_t> len;
  for (std::size_t i = 0; i < rules; ++i) {
    std::vector<Id> w;
    count_t total = 0;
    std::size_t parts = rng.uniform(0, 4);
    for (std::size_t j = 0; j < parts; ++j) {
      if (!nts.empty() && rng.chance(0.7)) {
        std::size_t k = rng.uniform(0, nts.size() - 1);
        if (total + len[k] > max_len) continue;
        w.push_back(nts[k]);
        total += len[k];
      } else if (total + 1 <= max_len) {
        w.push_back(rng.pick(sigma));
        total += 1;
      }
    }
    nts.push_back(g.add_rule("W", SymbolKind::word_nt, Rule::word(std::move(w))));
    len.push_back(total);
  }
  return g;
}

void random_stg(Grammar& g, Rng& rng, const Signature& sig, const StgShape& shape) {
  const SymbolTable& t = g.symbols();
  std::vector<Id> terms, contexts;
  auto recent = [&](const std::vector<Id>& pool) {
    // bias towards the newest quarter
    std::size_t n = pool.size();
    if (rng.chance(0.4)) return pool.back();
    if (n > 4 && rng.chance(0.6)) return pool[rng.uniform(n - (n + 3) / 4, n - 1)];
    return rng.pick(pool);
  };
  auto leaf = [&] {
    Id sym = !sig.variables.empty() && rng.chance(shape.variable) ? rng.pick(sig.variables) : rng.pick(sig.constants);
    terms.push_back(g.add_rule("A", SymbolKind::term_nt, Rule::apply(sym, {})));
  };
  leaf();
  if (!shape.dag) contexts.push_back(g.add_rule("C", SymbolKind::context_nt, Rule::hole()));
  std::size_t guard = 0;
  while (g.rule_count() < shape.rules + 2 && ++guard < 50 * shape.rules) {
    double r = rng.uniform(0, 999) / 1000.0;
    Rule rule;
    SymbolKind kind = SymbolKind::term_nt;
    if (r < 0.08) {
      leaf();
      continue;
    }
    Id f = rng.pick(sig.functions);
    std::uint32_t m = t.arity(f);
    if (shape.dag || r < 0.08 + (1 - 0.08) * (1 - shape.context)) {
      if (!shape.dag && rng.chance(0.15)) {
        Id c = recent(contexts);
        Id a = recent(terms);
        rule = Rule::ctx_apply(c, a);
      } else if (!shape.dag && rng.chance(0.05)) {
        rule = Rule::alias(recent(terms));
      } else {
        std::vector<Id> args;
        for (std::uint32_t j = 0; j < m; ++j) {
          args.push_back(rng.chance(0.1) ? rng.pick(sig.constants) : recent(terms));
        }
        rule = Rule::apply(f, std::move(args));
      }
    } else {
      kind = SymbolKind::context_nt;
      if (rng.chance(0.35) && contexts.size() > 1) {
        rule = Rule::compose(recent(contexts), recent(contexts));
      } else {
        std::vector<Id> args;
        std::uint32_t at = static_cast<std::uint32_t>(rng.uniform(1, m));
        for (std::uint32_t j = 1; j <= m; ++j) args.push_back(j == at ? recent(contexts) : recent(terms));
        rule = Rule::apply(f, std::move(args));
      }
    }
    Id n = g.add_rule(kind == SymbolKind::term_nt ? "A" : "C", kind, std::move(rule));
    if (g.word_size(n) > shape.max_size) {
      // too big: keep it out of the pools; it stays as an unused rule
      continue;
    }
    (kind == SymbolKind::term_nt ? terms : contexts).push_back(n);
  }
}

Grammar random_stg(Rng& rng, const StgShape& shape, std::size_t variables) {
  Grammar g;
  Signature sig = declare_signature(g, variables, 0);
  random_stg(g, rng, sig, shape);
  return g;
}

// ---- instances

namespace {

Substitution random_images(Rng& rng, const Signature& sig, const std::vector<Id>& vars, double keep,
                           const TermShape& shape) {
  Substitution s;
  for (Id v : vars) {
    if (!rng.chance(keep)) s.emplace(v, random_term(rng, sig, shape));
  }
  return s;
}

ExplicitTerm perturb(Rng& rng, const Signature& sig, const ExplicitTerm& t) {
  Signature ground = sig;
  ground.variables.clear();
  ground.context_variables.clear();
  return t.replace(rng.uniform(0, t.size() - 1), random_term(rng, ground, TermShape{2, 0.4, 0.0, 0.0}));
}

Instance finish(Grammar g, Rng& rng, const InstanceShape& shape,
                std::vector<std::pair<ExplicitTerm, ExplicitTerm>> terms) {
  Instance out;
  out.grammar = std::move(g);
  EncodeOptions opt;
  opt.dag_only = shape.dag;
  Encoder enc(out.grammar, rng, opt);
  for (auto& [s, t] : terms) out.equations.emplace_back(enc.encode(s), enc.encode(t));
  out.terms = std::move(terms);
  return out;
}

}  // namespace

Instance unify_instance(Rng& rng, const InstanceShape& shape) {
  Grammar g;
  Signature sig = declare_signature(g, shape.variables, 0);
  TermShape ts{shape.max_depth, 0.3, 0.35, 0.0};
  ExplicitTerm u = random_term(rng, sig, ts);
  TermShape small{2, 0.4, 0.3, 0.0};
  ExplicitTerm s = tgram::apply(random_images(rng, sig, sig.variables, 0.5, small), u);
  ExplicitTerm t = rng.chance(0.3) ? random_term(rng, sig, ts) : tgram::apply(random_images(rng, sig, sig.variables, 0.5, small), u);
  return finish(std::move(g), rng, shape, {{s, t}});
}

Instance match_instance(Rng& rng, const InstanceShape& shape) {
  Grammar g;
  Signature sig = declare_signature(g, shape.variables, 0);
  ExplicitTerm s = random_term(rng, sig, TermShape{shape.max_depth, 0.3, 0.4, 0.0});
  Signature ground = sig;
  ground.variables.clear();
  Substitution sigma = random_images(rng, ground, variables_of(s, g.symbols()), 0.0, TermShape{2, 0.4, 0.0, 0.0});
  ExplicitTerm t = tgram::apply(sigma, s);
  bool planted = !rng.chance(0.3);
  if (!planted) t = perturb(rng, sig, t);
  Instance out = finish(std::move(g), rng, shape, {{s, t}});
  out.planted = std::move(sigma);
  out.has_planted = planted;
  return out;
}

Instance cmatch_instance(Rng& rng, const InstanceShape& shape) {
  Grammar g;
  Signature sig = declare_signature(g, shape.variables, shape.context_variables);
  Signature ground = sig;
  ground.variables.clear();
  ground.context_variables.clear();
  Substitution sigma;
  for (Id x : sig.variables) sigma.emplace(x, random_term(rng, ground, TermShape{2, 0.4, 0.0, 0.0}));
  for (Id f : sig.context_variables) {
    sigma.emplace(f, rng.chance(0.15) ? ExplicitTerm::hole() : random_context(rng, sig, 2));
  }
  std::vector<std::pair<ExplicitTerm, ExplicitTerm>> terms;
  for (std::size_t i = 0; i < shape.equations; ++i) {
    ExplicitTerm s = random_term(rng, sig, TermShape{shape.max_depth, 0.3, 0.3, 0.3});
    terms.emplace_back(s, tgram::apply(sigma, s));
  }
  bool planted = !rng.chance(0.2);
  if (!planted) {
    auto& t = terms[rng.uniform(0, terms.size() - 1)].second;
    t = perturb(rng, sig, t);
  }
  Instance out = finish(std::move(g), rng, shape, std::move(terms));
  // only the variables that occur
  Substitution used;
  for (auto& [s, t] : out.terms) {
    for (Id v : variables_of(s, out.grammar.symbols())) used.emplace(v, sigma.at(v));
  }
  out.planted = std::move(used);
  out.has_planted = planted;
  return out;
}

// ---- fixed families

Grammar doubling_terms(std::size_t n) {
  Grammar g;
  Id f = g.declare_function("f", 2);
  Id a = g.declare_function("a", 0);
  std::vector<Id> A;
  for (std::size_t i = 0; i <= n; ++i) A.push_back(g.declare_nonterminal("A" + std::to_string(i), SymbolKind::term_nt));
  for (std::size_t i = 0; i < n; ++i) g.define(A[i], Rule::apply(f, {A[i + 1], A[i + 1]}));
  g.define(A[n], Rule::apply(a, {}));
  return g;
}

Grammar doubling_contexts(std::size_t n) {
  Grammar g;
  Id gs = g.declare_function("g", 1);
  std::vector<Id> C;
  for (std::size_t i = 0; i <= n; ++i) {
    C.push_back(g.declare_nonterminal("C" + std::to_string(i), SymbolKind::context_nt));
  }
  Id hole = g.declare_nonterminal("C", SymbolKind::context_nt);
  for (std::size_t i = 0; i < n; ++i) g.define(C[i], Rule::compose(C[i + 1], C[i + 1]));
  g.define(C[n], Rule::apply(gs, {hole}));
  g.define(hole, Rule::hole());
  return g;
}

ChainProblem unify_chain(std::size_t n) {
  ChainProblem p;
  Grammar& g = p.grammar;
  Id h = g.declare_function("h", static_cast<std::uint32_t>(n));
  Id f = g.declare_function("f", 2);
  std::vector<Id> x;
  for (std::size_t i = 0; i <= n; ++i) x.push_back(g.declare_variable("x" + std::to_string(i), 0));
  std::vector<Id> left, right;
  for (std::size_t i = 1; i <= n; ++i) {
    left.push_back(x[i]);
    right.push_back(g.add_rule("B", SymbolKind::term_nt, Rule::apply(f, {x[i - 1], x[i - 1]})));
  }
  p.s = g.add_rule("S", SymbolKind::term_nt, Rule::apply(h, std::move(left)));
  p.t = g.add_rule("T", SymbolKind::term_nt, Rule::apply(h, std::move(right)));
  return p;
}

}  // namespace tgram
