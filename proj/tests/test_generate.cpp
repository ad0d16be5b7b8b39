#include <set>

#include "doctest.h"
#include "support.hpp"
#include "tgram/generate.hpp"
#include "tgram/solvers.hpp"

using namespace tgram;

TEST_CASE("same seed, same output") {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    Rng r1(seed), r2(seed);
    InstanceShape shape;
    shape.context_variables = 1;
    shape.dag = true;
    CHECK(to_string(cmatch_instance(r1, shape).grammar) == to_string(cmatch_instance(r2, shape).grammar));
    Rng w1(seed), w2(seed);
    CHECK(to_string(random_word_grammar(w1, 3, 20, 50)) == to_string(random_word_grammar(w2, 3, 20, 50)));
  }
}

TEST_CASE("encoded terms decompress to themselves") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Grammar g;
    Signature sig = declare_signature(g, 2, 1);
    ExplicitTerm t = random_term(rng, sig, TermShape{5, 0.3, 0.2, 0.2});
    EncodeOptions opt;
    opt.dag_only = i % 2 == 0;
    Encoder enc(g, rng, opt);
    Id root = enc.encode(t);
    REQUIRE(validate(g).ok);
    CHECK(derive_term(g, root) == t);
    if (opt.dag_only) CHECK(is_dag(g));
  }
}

TEST_CASE("word grammars respect the length bound") {
  Rng rng(8);
  Grammar g = random_word_grammar(rng, 2, 40, 30);
  CHECK(validate(g).ok);
  for (Id n : g.nonterminals()) CHECK(g.word_size(n) <= 30);
}

TEST_CASE("planted context matching solutions are found") {
  Rng rng(41);
  int planted = 0;
  for (int i = 0; i < 100; ++i) {
    InstanceShape shape;
    shape.variables = 2;
    shape.context_variables = 1 + i % 2;
    shape.equations = 1 + i % 2;
    shape.max_depth = 3;
    shape.dag = true;
    Instance inst = cmatch_instance(rng, shape);
    if (!inst.has_planted) continue;
    ++planted;
    KcmdResult r = kcmd_solve(KcmdProblem{inst.grammar, inst.equations}, 2);
    std::set<std::string> found;
    for (auto& s : all_solutions(r, inst.grammar.symbols(), 100000)) found.insert(to_string(s, inst.grammar.symbols()));
    CHECK(found.count(to_string(inst.planted, inst.grammar.symbols())) == 1);
  }
  CHECK(planted > 50);
}

TEST_CASE("fixed families") {
  Grammar d = doubling_terms(2);
  CHECK(support::show(d, "A0") == "f(f(a,a),f(a,a))");
  Grammar c = doubling_contexts(1);
  CHECK(support::show(c, "C0") == "g(g([]))");
  ChainProblem p = unify_chain(2);
  CHECK(to_string(derive_term(p.grammar, p.s), p.grammar.symbols()) == "h(x1,x2)");
  CHECK(to_string(derive_term(p.grammar, p.t), p.grammar.symbols()) == "h(f(x0,x0),f(x1,x1))");
}
