#include <unordered_set>

#include "doctest.h"
#include "support.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"
#include "tgram/ops.hpp"

using namespace tgram;
using support::id;
using support::show;

namespace {

std::string word_text(const Grammar& g, Id n) {
  std::string s;
  for (Id x : derive_word(g, n)) s += (s.empty() ? "" : " ") + g.name(x);
  return s;
}

const char* jc_grammar = R"(
sig f/3 g/2 h/2 a/0 b/0 c/0
term HA -> h(a, a)
term HB -> h(b, b)
term GU -> g(HA, c)
term GV -> g(HB, c)
term U -> f(a, GU, b)
term V -> f(a, GV, b)
term FW -> f(a, b, c)
term W -> g(FW, b)
)";

}  // namespace

TEST_CASE("preorder grammar") {
  Grammar g = parse_grammar("sig f/2 a/0\nterm A -> f(B, B)\nterm B -> a");
  PreGrammar p = build_pre(g);
  CHECK(word_text(p.grammar, p.P[id(g, "A")]) == "f a a");

  Grammar h = parse_grammar("ctx C -> []");
  PreGrammar q = build_pre(h);
  CHECK(derive_word(q.grammar, q.L[id(h, "C")]).empty());
  CHECK(derive_word(q.grammar, q.R[id(h, "C")]).empty());

  Grammar k = parse_grammar("sig f/3 g/1 a/0 b/0\nctx C -> f(A, D, B)\nctx D -> g(E)\nctx E -> []\nterm A -> a\nterm B -> b\nterm T -> C A");
  PreGrammar r = build_pre(k);
  CHECK(word_text(r.grammar, r.L[id(k, "C")]) == "f a g");
  CHECK(word_text(r.grammar, r.R[id(k, "C")]) == "b");
  CHECK(word_text(r.grammar, r.P[id(k, "T")]) == "f a g a b");
}

TEST_CASE("subterm extension") {
  Grammar g = doubling_terms(3);
  Extension e = kext(g, id(g, "A0"), 1);
  CHECK(e.result == id(g, "A0"));
  CHECK(e.added == 0);
  e = kext(g, id(g, "A0"), 2);
  CHECK(show(e.grammar, e.result) == show(g, "A1"));
  e = kext(g, id(g, "A0"), 9);
  CHECK(show(e.grammar, e.result) == show(g, "A1"));
  CHECK_THROWS_AS(kext(g, id(g, "A0"), 16), Error);

  // inside a context application the result may itself be a context
  Grammar k = parse_grammar("sig f/2 g/1 a/0 b/0\nctx C -> f(A, D)\nctx D -> g(E)\nctx E -> []\nterm A -> a\nterm B -> b\nterm T -> C B");
  Extension x = kext(k, id(k, "T"), 3);
  CHECK(show(x.grammar, x.result) == "g(b)");
  CHECK(x.added <= k.depth());
  x = kext(k, id(k, "T"), 4);
  CHECK(show(x.grammar, x.result) == "b");
}

TEST_CASE("hole grammar") {
  Grammar g = parse_grammar("sig g/1\nctx C -> g(C1)\nctx C1 -> []");
  HoleGrammar h = build_hole(g);
  CHECK(word_text(h.grammar, h.H[id(g, "C")]) == "d1");
  Grammar d = doubling_contexts(3);
  HoleGrammar hd = build_hole(d);
  CHECK(hd.grammar.word_size(hd.H[id(d, "C0")]) == 8);
  Grammar d40 = doubling_contexts(40);
  HoleGrammar h40 = build_hole(d40);
  CHECK(h40.grammar.word_size(h40.H[id(d40, "C0")]) == (count_t{1} << 40));
}

TEST_CASE("prefix and suffix contexts") {
  Grammar g = doubling_contexts(4);
  Id c0 = id(g, "C0");
  Extension p = pref(g, c0, 0);
  CHECK(show(p.grammar, p.result) == "[]");
  p = pref(g, c0, 16);
  CHECK(p.result == c0);
  p = pref(g, c0, 5);
  CHECK(show(p.grammar, p.result) == "g(g(g(g(g([])))))");
  CHECK_THROWS_AS(pref(g, c0, 17), Error);

  Extension s = suff(g, c0, 0);
  CHECK(s.result == c0);
  s = suff(g, c0, 16);
  CHECK(show(s.grammar, s.result) == "[]");
  s = suff(g, c0, 11);
  CHECK(derive_term(s.grammar, s.result).size() == 6);
}

TEST_CASE("prefix context at a position") {
  Grammar g = parse_grammar("sig f/2 a/0 b/0\nterm A -> f(B, B2)\nterm B -> a\nterm B2 -> b");
  Extension e = pcon(g, id(g, "A"), {});
  CHECK(show(e.grammar, e.result) == "[]");
  e = pcon(g, id(g, "A"), {2});
  CHECK(show(e.grammar, e.result) == "f(a,[])");
  CHECK_THROWS_AS(pcon(g, id(g, "A"), {3}), Error);
  CHECK_THROWS_AS(pcon(g, id(g, "A"), {1, 1}), Error);

  Grammar k = parse_grammar("sig f/2 g/1 a/0 b/0\nctx C -> f(A, D)\nctx D -> g(E)\nctx E -> []\nterm A -> a\nterm B -> f(A, A)\nterm T -> C B");
  e = pcon(k, id(k, "T"), {2, 1, 2});
  CHECK(show(e.grammar, e.result) == "f(a,g(f(a,[])))");
  e = pcon(k, id(k, "T"), {1});
  CHECK(show(e.grammar, e.result) == "f([],g(f(a,a)))");
  e = pcon(k, id(k, "T"), {2});
  CHECK(show(e.grammar, e.result) == "f(a,[])");
}

TEST_CASE("joint contexts on grammars") {
  Grammar g = parse_grammar(jc_grammar);
  Id u = id(g, "U"), v = id(g, "V"), w = id(g, "W");
  Extension e = joint_cg(g, u, v, 0);
  CHECK(show(e.grammar, e.result) == "[]");
  e = joint_cg(g, u, w, 0);
  CHECK(show(e.grammar, e.result) == "[]");
  e = joint_cg(g, u, v, 1);
  CHECK(show(e.grammar, e.result) == "f(a,[],b)");
  e = joint_cg(g, u, v, 2);
  CHECK(show(e.grammar, e.result) == "f(a,g([],c),b)");
  try {
    joint_cg(g, u, w, 1);
    FAIL("no throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::undefined_extension);
  }
  try {
    joint_cg(g, u, v, 3);
    FAIL("no throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::undefined_extension);
  }
}

TEST_CASE("joint context bound to a variable") {
  Grammar g = parse_grammar(std::string(jc_grammar) + "var F/1\nterm P -> F(a)\n");
  std::size_t added = joint_cgf(g, id(g, "F"), id(g, "U"), id(g, "V"), 2);
  CHECK(added >= 1);
  CHECK(validate(g).ok);
  CHECK(show(g, "F") == "f(a,g([],c),b)");
  CHECK(show(g, "P") == "f(a,g(a,c),b)");

  Grammar h = parse_grammar(std::string(jc_grammar) + "var F/1\nterm P -> F(HA)\n");
  joint_cgf(h, id(h, "F"), id(h, "U"), id(h, "V"), 0);
  CHECK(show(h, "P") == show(h, "HA"));
}

TEST_CASE("binding variables") {
  Grammar g = parse_grammar("sig f/1 a/0\nvar x/0\nterm A -> f(x)\nterm B -> f(C)\nterm C -> a\nterm D -> f(A)");
  bind_var(g, id(g, "x"), id(g, "B"));
  CHECK(show(g, "D") == "f(f(f(a)))");
  Grammar h = parse_grammar("sig f/1 a/0\nvar x/0\nterm A -> f(x)\nterm D -> f(A)");
  try {
    bind_var(h, id(h, "x"), id(h, "D"));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::occurs_violation);
  }
}

TEST_CASE("vdepth does not change under binding") {
  Rng rng(23);
  for (int round = 0; round < 300; ++round) {
    Grammar g;
    Signature sig = declare_signature(g, 3, 0);
    Encoder enc(g, rng, EncodeOptions{});
    std::vector<Id> roots;
    for (int i = 0; i < 3; ++i) roots.push_back(enc.encode(random_term(rng, sig, TermShape{4, 0.3, 0.3, 0.0})));
    std::unordered_set<Id> v;
    std::vector<std::uint32_t> before = vdepth_all(g, v);
    std::size_t old = g.symbol_count();
    for (Id x : sig.variables) {
      Id target = roots[rng.uniform(0, roots.size() - 1)];
      if (occurs_terminal(g, x, target)) continue;
      bind_var(g, x, target);
      v.insert(x);
      std::vector<std::uint32_t> after = vdepth_all(g, v);
      for (Id n = 0; n < old; ++n) {
        if (g.symbols().is_nonterminal(n) && !v.count(n)) CHECK(after[n] == before[n]);
      }
    }
  }
}
