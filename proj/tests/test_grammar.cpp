#include <unordered_set>

#include "doctest.h"
#include "support.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"
#include "tgram/ops.hpp"

using namespace tgram;
using support::id;
using support::show;
using support::str;

TEST_CASE("symbol table") {
  SymbolTable t;
  Id f = t.declare_function("f", 2);
  CHECK(t.find("f") == f);
  CHECK(t.arity(f) == 2);
  CHECK(t.is_terminal(f));
  CHECK_THROWS_AS(t.declare_function("f", 1), Error);
  CHECK_THROWS_AS(t.declare_function("1x", 0), Error);
  Id x = t.declare_variable("x", 0);
  Id F = t.declare_variable("F", 1);
  CHECK(t.is_first_order_variable(x));
  CHECK(t.is_context_variable(F));
  Id n = t.fresh_nonterminal("A", SymbolKind::term_nt);
  CHECK(t.is_nonterminal(n));
  CHECK(t.find("hole") == no_id);
  CHECK(t.name(hole_id) == "[]");
}

TEST_CASE("doubling terms") {
  Grammar g = doubling_terms(3);
  CHECK(validate(g).ok);
  CHECK(is_dag(g));
  ExplicitTerm t = derive_term(g, id(g, "A0"));
  CHECK(t.size() == 15);
  CHECK(t.height() == 3);
  CHECK(g.word_size(id(g, "A0")) == 15);
  CHECK(g.height(id(g, "A0")) == 3);
  CHECK(occurs_terminal(g, id(g, "a"), id(g, "A0")));
  Grammar g40 = doubling_terms(40);
  CHECK(str(g40.word_size(id(g40, "A0"))) == str((count_t{1} << 41) - 1));
  CHECK(g40.rule_count() == 41);
}

TEST_CASE("doubling contexts") {
  Grammar g = doubling_contexts(4);
  CHECK(validate(g).ok);
  ExplicitTerm c = derive_term(g, id(g, "C0"));
  CHECK(c.size() == 17);
  CHECK(hole_path(c).size() == 16);
  CHECK(g.hole_depth(id(g, "C0")) == 16);
  Grammar g10 = doubling_contexts(10);
  CHECK(g10.word_size(id(g10, "C0")) == 1025);
  Grammar g5 = doubling_contexts(5);
  CHECK(heights(g5, id(g5, "C0")).hole_depth.value() == 32);
  CHECK(show(doubling_contexts(2), "C0") == "g(g(g(g([]))))");
  Grammar empty = parse_grammar("ctx C -> []");
  CHECK(show(empty, "C") == "[]");
  CHECK(empty.word_size(id(empty, "C")) == 1);
}

TEST_CASE("validation reports the first violation") {
  CHECK(validate(parse_grammar("sig f/1 a/0\nterm A -> f(B)\nterm B -> a")).ok);
  ValidationReport r = validate(parse_grammar("sig f/1\nterm A -> f(A)"));
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("recursion") != std::string::npos);

  r = validate(parse_grammar("sig a/0 b/0\nterm A -> a\nterm A -> b"));
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("singleton") != std::string::npos);

  r = validate(parse_grammar("sig f/2 a/0\nterm A -> f(a)"));
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("arity") != std::string::npos);

  r = validate(parse_grammar("sig f/2 a/0\nctx C -> f(a, a)"));
  CHECK_FALSE(r.ok);

  r = validate(parse_grammar("sig g/1\nctx C -> g(D)\nctx D -> []\nterm A -> D"));
  CHECK_FALSE(r.ok);
  CHECK(r.offending == id(parse_grammar("sig g/1\nctx C -> g(D)\nctx D -> []\nterm A -> D"), "A"));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_grammar("term A f(a)"), Error);
  CHECK_THROWS_AS(parse_grammar("sig f/x"), Error);
  CHECK_THROWS_AS(parse_grammar("sig f/1\nterm A -> f(B)"), Error);
  CHECK_THROWS_AS(parse_grammar("bogus line"), Error);
  CHECK_THROWS_AS(parse_grammar("sig a/0\nterm a -> a"), Error);
  try {
    parse_grammar("sig a/0\n\nterm A -> q");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("print and parse round trip") {
  Grammar g = parse_grammar(R"(
# comment
sig f/2 g/1 a/0
var x/0 F/1
term A -> f(B, x)
term B -> C D
ctx C -> E E
ctx E -> g(H)
ctx H -> []
term D -> a
term K -> F(D)
term Q -> A
word W -> a a
)");
  REQUIRE(validate(g).ok);
  CHECK(same_grammar(parse_grammar(to_string(g)), g));
  CHECK(show(g, "A") == "f(g(g(a)),x)");
  CHECK(show(g, "K") == "F(a)");

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Grammar h;
    Signature sig = declare_signature(h, 2, 1);
    Encoder enc(h, rng, EncodeOptions{});
    enc.encode(random_term(rng, sig, TermShape{4, 0.3, 0.3, 0.2}));
    REQUIRE(validate(h).ok);
    Grammar back = parse_grammar(to_string(h));
    CHECK(same_grammar(back, h));
    CHECK(to_string(back) == to_string(h));
  }
}

TEST_CASE("bound variables survive printing") {
  Grammar g = parse_grammar("sig f/2 a/0\nvar x/0\nterm A -> f(x, x)\nterm B -> a");
  bind_var(g, id(g, "x"), id(g, "B"));
  Grammar back = parse_grammar(to_string(g));
  CHECK(validate(back).ok);
  CHECK(show(back, "A") == "f(a,a)");
}

TEST_CASE("decompression guard") {
  Grammar g = doubling_terms(20);
  try {
    derive_term(g, id(g, "A0"), 1000);
    FAIL("no throw");
  } catch (const SizeLimitExceeded& e) {
    CHECK(str(e.true_size()) == str((count_t{1} << 21) - 1));
  }
}

TEST_CASE("restriction") {
  Grammar g = doubling_terms(5);
  Restricted r = restriction(g, {id(g, "A2")});
  CHECK(r.grammar.rule_count() == 4);
  CHECK(r.grammar.symbols().find("A1") == no_id);
  CHECK(show(r.grammar, "A2") == show(g, "A2"));
  Restricted all = restriction(g, g.nonterminals());
  CHECK(same_grammar(all.grammar, g));
  CHECK(all.grammar.size() <= g.size());
}

TEST_CASE("vdepth") {
  Grammar g = parse_grammar("sig f/2 a/0\nvar x/0\nterm A -> f(B, x)\nterm B -> f(C, C)\nterm C -> a");
  std::unordered_set<Id> none;
  for (Id n : g.nonterminals()) CHECK(vdepth(g, none, n) == g.depth(n));
  bind_var(g, id(g, "x"), id(g, "B"));
  std::unordered_set<Id> v{id(g, "x")};
  CHECK(vdepth(g, v, id(g, "x")) == 0);
  CHECK(vdepth(g, v, id(g, "A")) == 3);
  CHECK_THROWS_AS(vdepth(g, {id(g, "B")}, id(g, "A")), Error);
}

TEST_CASE("canonical dag") {
  Grammar g = parse_grammar("sig f/2 a/0\nterm A -> f(B, C)\nterm B -> a\nterm C -> a");
  Restricted c = canonical_dag(g);
  CHECK(c.map.at(id(g, "B")) == c.map.at(id(g, "C")));
  CHECK(c.grammar.rule_count() == 2);
  CHECK(show(c.grammar, c.map.at(id(g, "A"))) == "f(a,a)");

  Grammar d = doubling_terms(4);
  Restricted cd = canonical_dag(d);
  CHECK(cd.grammar.rule_count() == d.rule_count());
  Restricted twice = canonical_dag(cd.grammar);
  CHECK(twice.grammar.rule_count() == cd.grammar.rule_count());

  // constants given directly as arguments join the class of their leaf rule
  Grammar m = parse_grammar("sig f/2 a/0 b/0\nterm A -> f(a, b)\nterm B -> f(D, b)\nterm D -> a\nterm E -> f(b, a)");
  Restricted cm = canonical_dag(m);
  CHECK(cm.map.at(id(m, "A")) == cm.map.at(id(m, "B")));
  CHECK(cm.map.at(id(m, "A")) != cm.map.at(id(m, "E")));
  CHECK(validate(cm.grammar).ok);
}

TEST_CASE("random grammars against decompression") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    Grammar g;
    Signature sig = declare_signature(g, 1, 0);
    Encoder enc(g, rng, EncodeOptions{});
    ExplicitTerm t = random_term(rng, sig, TermShape{5, 0.25, 0.2, 0.0});
    Id root = enc.encode(t);
    REQUIRE(validate(g).ok);
    CHECK(derive_term(g, root) == t);
    CHECK(g.height(root) == t.height());
    for (Id alpha : {sig.constants[0], sig.constants[1], sig.variables[0], sig.functions[2]}) {
      CHECK(occurs_terminal(g, alpha, root) == t.contains(alpha));
    }
    for (Id n : g.nonterminals()) {
      if (g.kind(n) != SymbolKind::context_nt) continue;
      ExplicitTerm c = derive_term(g, n);
      CHECK(heights(g, n).hole_depth.value() == hole_path(c).size());
      CHECK(g.height(n) == c.height());
      CHECK(g.left_size(n) == node_at(c, hole_path(c)));
    }
  }
}
