#include "doctest.h"
#include "support.hpp"
#include "tgram/compare.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"

using namespace tgram;
using support::id;

TEST_CASE("normal form keeps words") {
  Grammar g = parse_grammar("sig a/0 b/0 c/0\nword P -> a b c\nword Q -> P P\nword E ->\nword R -> E a E");
  Grammar n = to_cnf(g, {id(g, "P"), id(g, "Q"), id(g, "R")});
  CHECK(validate(n).ok);
  for (Id x : n.nonterminals()) {
    const Rule& r = n.rule(x);
    CHECK(r.shape == Shape::word);
    bool binary = r.args.size() == 2 && n.symbols().is_nonterminal(r.args[0]) && n.symbols().is_nonterminal(r.args[1]);
    bool unit = r.args.size() == 1 && n.symbols().is_terminal(r.args[0]);
    CHECK((binary || unit));
  }
  for (const char* name : {"P", "Q", "R"}) {
    std::vector<std::string> a, b;
    for (Id s : derive_word(g, id(g, name))) a.push_back(g.name(s));
    for (Id s : derive_word(n, id(n, name))) b.push_back(n.name(s));
    CHECK(a == b);
  }
  CHECK_THROWS_AS(to_cnf(g, {id(g, "E")}), Error);

  Grammar already = parse_grammar("sig a/0 b/0\nword A -> a\nword B -> b\nword P -> A B");
  Grammar same = to_cnf(already, {id(already, "P")});
  CHECK(same.rule_count() == already.rule_count());
}

TEST_CASE("occurrences") {
  Grammar g = parse_grammar("sig a/0 b/0\nword P1 -> a b\nword P2 -> P1 P1");
  OccurrenceIndex ix(g);
  Id p1 = id(g, "P1"), p2 = id(g, "P2");
  CHECK(ix.occurs(p1, p2, 1));
  CHECK_FALSE(ix.occurs(p1, p2, 2));
  CHECK(ix.occurs(p1, p2, 3));
  CHECK_FALSE(ix.occurs(p1, p2, 4));
  CHECK(ix.occurs(p2, p2, 1));
  CHECK(ix.occurs(p1, p1, 1));
  CHECK(ix.char_at(p2, 3) == id(g, "a"));
  CHECK(ix.length(p2) == 4);
}

TEST_CASE("word equality") {
  Grammar g = parse_grammar(R"(
sig a/0 b/0
word Q -> a b
word P -> Q Q
word S -> a b
word R -> b S
word P2 -> a R
word L -> a b a
)");
  CHECK(eq_words(g, id(g, "P"), id(g, "P")));
  CHECK(eq_words(g, id(g, "P"), id(g, "P2")));
  CHECK_FALSE(eq_words(g, id(g, "P"), id(g, "L")));
  OccurrenceIndex ix(g);
  CHECK_FALSE(ix.equal(id(g, "P"), id(g, "L")));
  CHECK(ix.queries() == 0);
}

TEST_CASE("term equality") {
  Grammar g = doubling_terms(6);
  // a second chain for A1 built differently: B1 -> f(B2, A2)
  Id f = id(g, "f");
  Id b1 = g.add_rule("B", SymbolKind::term_nt, Rule::apply(f, {id(g, "A2"), id(g, "A2")}));
  Id c = g.add_rule("C", SymbolKind::context_nt, Rule::hole());
  Id d = g.add_rule("D", SymbolKind::context_nt, Rule::apply(f, {c, id(g, "A3")}));
  Id e = g.add_rule("E", SymbolKind::term_nt, Rule::ctx_apply(d, id(g, "A3")));
  CHECK(eq_terms(g, id(g, "A1"), id(g, "A1")));
  CHECK(eq_terms(g, id(g, "A1"), b1));
  CHECK(eq_terms(g, id(g, "A2"), e));
  CHECK_FALSE(eq_terms(g, id(g, "A1"), e));

  Grammar h = parse_grammar("sig f/2 a/0 b/0\nterm X -> f(a, b)\nterm Y -> f(b, a)");
  CHECK_FALSE(eq_terms(h, id(h, "X"), id(h, "Y")));
}

TEST_CASE("first difference") {
  Grammar g = parse_grammar("sig f/0 a/0 b/0\nword U -> f a b\nword V -> f b b\nword W -> f a\nword X -> f a b");
  OccurrenceIndex ix(g);
  Diff d = ix.first_diff(id(g, "U"), id(g, "V"));
  CHECK(d.kind == Diff::Kind::index);
  CHECK(d.index == 2);
  d = ix.first_diff(id(g, "W"), id(g, "U"));
  CHECK(d.kind == Diff::Kind::proper_prefix);
  CHECK(d.first_shorter);
  CHECK(d.index == 3);
  CHECK(ix.first_diff(id(g, "U"), id(g, "X")).kind == Diff::Kind::equal);

  // preorders of the joint-context example
  Grammar t = parse_grammar(R"(
sig f/3 g/2 h/2 a/0 b/0 c/0
term HA -> h(a, a)
term HB -> h(b, b)
term GU -> g(HA, c)
term GV -> g(HB, c)
term U -> f(a, GU, b)
term V -> f(a, GV, b)
)");
  PreGrammar pre = build_pre(t);
  OccurrenceIndex pix(pre.grammar);
  d = pix.first_diff(pre.P[id(t, "U")], pre.P[id(t, "V")]);
  CHECK(d.kind == Diff::Kind::index);
  CHECK(d.index == 5);
  CHECK(pix.last_diff_queries() <= pix.cnf_depth(pre.P[id(t, "U")]) + 1);
}

TEST_CASE("first variable") {
  Grammar g = parse_grammar("sig f/3 a/0 b/0\nvar x/0\nterm A -> f(a, x, b)\nterm B -> f(a, a, b)");
  PreGrammar pre = build_pre(g);
  OccurrenceIndex ix(pre.grammar);
  CHECK(ix.first_var_index(pre.P[id(g, "A")]).value() == 3);
  CHECK_FALSE(ix.first_var_index(pre.P[id(g, "B")]).has_value());
}

TEST_CASE("long words use fingerprints") {
  Grammar g;
  Id a = g.declare_function("a", 0);
  Id b = g.declare_function("b", 0);
  std::vector<Id> p{g.add_rule("W", SymbolKind::word_nt, Rule::word({a}))};
  for (int i = 0; i < 60; ++i) p.push_back(g.add_rule("W", SymbolKind::word_nt, Rule::word({p.back(), p.back()})));
  Id last_b = g.add_rule("W", SymbolKind::word_nt, Rule::word({p[59], p[58], p[57], b}));
  Id all_a = g.add_rule("W", SymbolKind::word_nt, Rule::word({p[59], p[58], p[57], a}));
  OccurrenceIndex ix(g);
  Diff d = ix.first_diff(last_b, all_a);
  CHECK(d.kind == Diff::Kind::index);
  CHECK(d.index == (count_t{1} << 59) + (count_t{1} << 58) + (count_t{1} << 57) + 1);
  CHECK(ix.last_diff_queries() <= ix.cnf_depth(last_b) + 1);
  CHECK(ix.occurs(p[57], p[60], (count_t{1} << 59) + 1));
}
