#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "tgram/compare.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"
#include "tgram/solvers.hpp"

using namespace tgram;
using support::id;
using support::show;
using support::term;

namespace {

const char* intro = R"(
sig f/2 g/2 h/1 a/0 b/0
var F/1
term GAB -> g(a, b)
term HB -> h(b)
term GAHB -> g(a, HB)
term T -> f(GAB, GAHB)
term P1 -> F(a)
term FB -> F(b)
term FHB -> F(HB)
term P2 -> f(FB, FHB)
term P3 -> f(FB, FB)
)";

std::set<std::string> solution_texts(const KcmdResult& r, const Grammar& g) {
  std::set<std::string> out;
  for (auto& s : all_solutions(r, g.symbols(), 1000)) out.insert(to_string(s, g.symbols()));
  return out;
}

}  // namespace

TEST_CASE("unification basics") {
  Grammar g = parse_grammar("sig f/2 a/0 b/0\nvar x/0\nterm A -> f(x, a)\nterm B -> f(b, x)\nterm C -> f(a, a)");
  FirstOrderResult r = unify_stg(g, id(g, "A"), id(g, "A"));
  CHECK(r.solvable);
  CHECK(r.grammar.rule_count() == g.rule_count());
  r = unify_stg(g, id(g, "A"), id(g, "B"));
  CHECK_FALSE(r.solvable);
  CHECK(r.reason == "clash");
  r = unify_stg(g, id(g, "A"), id(g, "C"));
  CHECK(r.solvable);
  CHECK(to_string(read_substitution(r.grammar, r.variables), r.grammar.symbols()) == "{x -> a}");

  Grammar o = parse_grammar("sig f/2 a/0\nvar x/0\nterm A -> f(x, a)\nterm B -> f(C, a)\nterm C -> f(x, a)");
  r = unify_stg(o, id(o, "A"), id(o, "B"));
  CHECK_FALSE(r.solvable);
  CHECK(r.reason == "occurs");
}

TEST_CASE("unification of the doubling chain") {
  ChainProblem p = unify_chain(10);
  FirstOrderResult r = unify_stg(p.grammar, p.s, p.t);
  REQUIRE(r.solvable);
  const Grammar& g = r.grammar;
  for (int i = 1; i <= 10; ++i) {
    Id x = id(g, "x" + std::to_string(i));
    CHECK(g.word_size(x) == (count_t{1} << (i + 1)) - 1);
  }
  CHECK(r.stats.rules_after <= r.stats.bound);
  CHECK(r.stats.bound == p.grammar.rule_count() + 11 * p.grammar.depth());

  // small cases agree with Robinson
  for (std::size_t n = 1; n <= 4; ++n) {
    ChainProblem q = unify_chain(n);
    FirstOrderResult rq = unify_stg(q.grammar, q.s, q.t);
    REQUIRE(rq.solvable);
    auto naive = naive_unify(derive_term(q.grammar, q.s), derive_term(q.grammar, q.t), q.grammar.symbols());
    REQUIRE(naive);
    Substitution mine = read_substitution(rq.grammar, rq.variables);
    for (auto& [v, t] : *naive) {
      Id v2 = rq.grammar.symbols().at(q.grammar.name(v));
      REQUIRE(mine.count(v2));
      CHECK(to_string(mine.at(v2), rq.grammar.symbols()) == to_string(t, q.grammar.symbols()));
    }
  }
}

TEST_CASE("first-order matching") {
  Grammar g = parse_grammar("sig f/2 g/1 a/0 b/0\nvar x/0 y/0\nterm S -> x\nterm U -> g(a)\nterm T -> f(U, U)\nterm P -> f(x, x)\nterm Q -> f(x, y)\nterm R -> f(a, b)");
  FirstOrderResult r = match_stg(g, id(g, "S"), id(g, "T"));
  REQUIRE(r.solvable);
  CHECK(to_string(read_substitution(r.grammar, r.variables), r.grammar.symbols()) == "{x -> f(g(a),g(a))}");
  r = match_stg(g, id(g, "P"), id(g, "T"));
  REQUIRE(r.solvable);
  CHECK(to_string(read_substitution(r.grammar, r.variables), r.grammar.symbols()) == "{x -> g(a)}");
  r = match_stg(g, id(g, "P"), id(g, "R"));
  CHECK_FALSE(r.solvable);
  CHECK(r.reason == "no-match");
  r = match_stg(g, id(g, "Q"), id(g, "R"));
  CHECK(r.solvable);
  CHECK(r.stats.rules_after <= r.stats.bound);
  CHECK_THROWS_AS(match_stg(g, id(g, "R"), id(g, "P")), Error);
}

TEST_CASE("context matching on the introductory instances") {
  Grammar g = parse_grammar(intro);
  KcmdResult r1 = kcmd_solve(KcmdProblem{g, {{id(g, "P1"), id(g, "T")}}}, 1);
  CHECK(solution_texts(r1, g) == std::set<std::string>{"{F -> f(g([],b),g(a,h(b)))}", "{F -> f(g(a,b),g([],h(b)))}"});
  KcmdResult r2 = kcmd_solve(KcmdProblem{g, {{id(g, "P2"), id(g, "T")}}}, 1);
  CHECK(solution_texts(r2, g) == std::set<std::string>{"{F -> g(a,[])}"});
  KcmdResult r3 = kcmd_solve(KcmdProblem{g, {{id(g, "P3"), id(g, "T")}}}, 1);
  CHECK(solution_texts(r3, g).empty());
  CHECK(r3.forms.empty());

  CHECK_THROWS_AS(kcmd_solve(KcmdProblem{g, {{id(g, "P1"), id(g, "T")}}}, 0), Error);
}

TEST_CASE("enumeration of a solved form without constraints") {
  Grammar g = parse_grammar("sig f/2 a/0\nvar x/0\nterm P -> f(x, a)\nterm T -> f(A, A)\nterm A -> a");
  KcmdResult r = kcmd_solve(KcmdProblem{g, {{id(g, "P"), id(g, "T")}}}, 1);
  REQUIRE(r.forms.size() == 1);
  CHECK(r.forms[0].gamma.empty());
  auto sols = enumerate_solutions(r.forms[0], 10);
  REQUIRE(sols.size() == 1);
  CHECK(to_string(translate(sols[0], r.forms[0].grammar.symbols(), g.symbols()), g.symbols()) == "{x -> a}");
}

TEST_CASE("exponentially many contexts") {
  // t_i = f(t_{i+1}, t'_{i+1}), t'_i = f(t'_{i+1}, t_{i+1}), t_n = f(a,b), t'_n = f(b,a)
  auto build = [](std::size_t n) {
    Grammar g;
    Id f = g.declare_function("f", 2);
    Id a = g.declare_function("a", 0);
    Id b = g.declare_function("b", 0);
    Id F = g.declare_variable("F", 1);
    std::vector<Id> t(n + 1), u(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
      t[i] = g.declare_nonterminal("t" + std::to_string(i), SymbolKind::term_nt);
      u[i] = g.declare_nonterminal("u" + std::to_string(i), SymbolKind::term_nt);
    }
    g.define(t[n], Rule::apply(f, {a, b}));
    g.define(u[n], Rule::apply(f, {b, a}));
    for (std::size_t i = n - 1; i >= 1; --i) {
      g.define(t[i], Rule::apply(f, {t[i + 1], u[i + 1]}));
      g.define(u[i], Rule::apply(f, {u[i + 1], t[i + 1]}));
    }
    Id p = g.add_rule("P", SymbolKind::term_nt, Rule::apply(F, {u[n - 1]}));
    return std::make_tuple(g, p, t[1]);
  };
  for (std::size_t n = 2; n <= 4; ++n) {
    auto [g, p, t1] = build(n);
    KcmdResult r = kcmd_solve(KcmdProblem{g, {{p, t1}}}, 1);
    auto brute = brute_context_match({{derive_term(g, p), derive_term(g, t1)}}, g.symbols());
    std::set<std::string> b;
    for (auto& s : brute) b.insert(to_string(s, g.symbols()));
    CHECK(solution_texts(r, g) == b);
  }
  auto [g, p, t1] = build(12);
  KcmdResult r = kcmd_solve(KcmdProblem{g, {{p, t1}}}, 1);
  CHECK_FALSE(r.forms.empty());
}

TEST_CASE("certificates") {
  Grammar g = parse_grammar(intro);
  Id F = id(g, "F");
  Substitution good{{F, term(g, "g(a,[])")}};
  Grammar cert = build_certificate(g, id(g, "P2"), id(g, "T"), good);
  CHECK(verify_certificate(g, cert, "P2", "T"));
  CHECK(show(cert, "F") == "g(a,[])");

  // same pattern, hand-made wrong prefix
  Grammar bad = g;
  Id hole = bad.add_rule("C", SymbolKind::context_nt, Rule::hole());
  bad.bind(F, Rule::apply(id(g, "g"), {hole, id(g, "b")}));
  CHECK_FALSE(verify_certificate(g, bad, "P2", "T"));

  // no variables: nothing changes
  Grammar plain = parse_grammar("sig f/2 a/0\nterm A -> f(B, B)\nterm B -> a");
  Grammar same = build_certificate(plain, id(plain, "A"), id(plain, "A"), {});
  CHECK(same_grammar(same, plain));
  CHECK(verify_certificate(plain, same, "A", "A"));

  // changing an original rule is rejected outright
  Grammar changed = cert;
  changed.define(id(changed, "HB"), Rule::alias(id(changed, "GAB")));
  CHECK_THROWS_AS(verify_certificate(g, changed, "P2", "T"), Error);
}

TEST_CASE("problem files") {
  ProblemFile p = parse_problem(std::string("grammar {\n") + intro + "}\nkind cmatch\neq P1 = T\n");
  CHECK(p.kind == "cmatch");
  REQUIRE(p.equations.size() == 1);
  CHECK(p.equations[0].first == id(p.grammar, "P1"));
  CHECK_THROWS_AS(parse_problem("kind cmatch\neq A = B\n"), Error);
  CHECK_THROWS_AS(parse_problem(std::string("grammar {\n") + intro + "}\nkind unify\neq P1 = T\neq P2 = T\n"), Error);
  CHECK_THROWS_AS(parse_problem(std::string("grammar {\n") + intro + "}\nkind solve\neq P1 = T\n"), Error);
  CHECK_THROWS_AS(parse_problem(std::string("grammar {\n") + intro + "\nkind cmatch\n"), Error);
}
