#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"

using namespace tgram;
using support::term;

namespace {

Grammar intro_sig() {
  Grammar g;
  g.declare_function("f", 2);
  g.declare_function("g", 2);
  g.declare_function("h", 1);
  g.declare_function("a", 0);
  g.declare_function("b", 0);
  g.declare_function("c", 0);
  g.declare_variable("x", 0);
  g.declare_variable("y", 0);
  g.declare_variable("z", 0);
  g.declare_variable("F", 1);
  return g;
}

Grammar jc_sig() {
  Grammar g;
  g.declare_function("f", 3);
  g.declare_function("g", 2);
  g.declare_function("h", 2);
  g.declare_function("a", 0);
  g.declare_function("b", 0);
  g.declare_function("c", 0);
  return g;
}

std::string pre_string(const Grammar& g, const ExplicitTerm& t) {
  std::string s;
  for (Id x : preorder(t)) s += (s.empty() ? "" : " ") + g.name(x);
  return s;
}

}  // namespace

TEST_CASE("preorder") {
  Grammar g = intro_sig();
  CHECK(pre_string(g, term(g, "a")) == "a");
  CHECK(pre_string(g, term(g, "f(g(a,b), g(a,h(b)))")) == "f g a b g a h b");
  Grammar d = doubling_terms(3);
  CHECK(preorder(derive_term(d, support::id(d, "A0"))).size() == 15);
}

TEST_CASE("pindex and ipos") {
  Grammar g = intro_sig();
  ExplicitTerm t = term(g, "f(a,b)");
  CHECK(pindex(t, {}) == 1);
  CHECK(pindex(t, {2}) == 3);
  CHECK(ipos(t, 1).empty());
  CHECK(ipos(t, 2) == Position{1});
  CHECK(ipos(term(g, "f(g(a,b), c)"), 4) == Position{1, 2});
  CHECK_THROWS_AS(ipos(t, 4), Error);
  CHECK_THROWS_AS(ipos(t, 0), Error);
  CHECK_THROWS_AS(node_at(t, {3}), Error);

  Rng rng(11);
  Signature sig;
  for (const char* c : {"a", "b", "c"}) sig.constants.push_back(g.symbols().at(c));
  sig.functions = {g.symbols().at("h"), g.symbols().at("f"), g.symbols().at("g")};
  // random_term picks arity by position in `functions`: 1, 2, then 3; keep to h/1 and f/2
  sig.functions.pop_back();
  for (int i = 0; i < 50; ++i) {
    ExplicitTerm r = random_term(rng, sig, TermShape{4, 0.3, 0.0, 0.0});
    for (count_t k = 1; k <= r.size(); ++k) CHECK(pindex(r, ipos(r, k)) == k);
  }
}

TEST_CASE("positions print and parse") {
  CHECK(to_string(Position{}) == "");
  CHECK(to_string(Position{1, 2, 3}) == "1.2.3");
  CHECK(parse_position("1.2.3") == Position{1, 2, 3});
  CHECK(parse_position("") == Position{});
  CHECK_THROWS_AS(parse_position("1..2"), Error);
  CHECK_THROWS_AS(parse_position("0"), Error);
}

TEST_CASE("term parse and print") {
  Grammar g = intro_sig();
  CHECK(to_string(term(g, " f( g(a , b),h([]) ) "), g.symbols()) == "f(g(a,b),h([]))");
  CHECK_THROWS_AS(term(g, "f(a)"), Error);
  CHECK_THROWS_AS(term(g, "q(a)"), Error);
  CHECK_THROWS_AS(term(g, "f(a,b"), Error);
  CHECK(is_context(term(g, "h([])")));
  CHECK_FALSE(is_context(term(g, "h(a)")));
  CHECK(hole_path(term(g, "f(a,h([]))")) == Position{2, 1});
}

TEST_CASE("joint contexts of the worked example") {
  Grammar g = jc_sig();
  ExplicitTerm u = term(g, "f(a,g(h(a,a),c),b)");
  ExplicitTerm v = term(g, "f(a,g(h(b,b),c),b)");
  ExplicitTerm w = term(g, "g(f(a,b,c),b)");
  auto s = [&](const std::optional<ExplicitTerm>& t) { return t ? to_string(*t, g.symbols()) : "undefined"; };
  CHECK(s(joint_con(u, v, 0)) == "[]");
  CHECK(s(joint_con(u, w, 0)) == "[]");
  CHECK(s(joint_con(u, v, 1)) == "f(a,[],b)");
  CHECK(s(joint_con(u, w, 1)) == "undefined");
  CHECK(s(joint_con(u, v, 2)) == "f(a,g([],c),b)");
  CHECK(s(joint_con(u, v, 3)) == "undefined");
  CHECK_THROWS_AS(joint_con(u, u, 1), Error);
}

TEST_CASE("naive unification") {
  Grammar g = intro_sig();
  const SymbolTable& t = g.symbols();
  auto r = naive_unify(term(g, "x"), term(g, "h(a)"), t);
  REQUIRE(r);
  CHECK(to_string(*r, t) == "{x -> h(a)}");
  CHECK_FALSE(naive_unify(term(g, "f(x,x)"), term(g, "f(a,b)"), t));
  CHECK_FALSE(naive_unify(term(g, "x"), term(g, "h(x)"), t));
  // f(x, h(x)) = f(h(y), z)
  r = naive_unify(term(g, "f(x,h(x))"), term(g, "f(h(y),z)"), t);
  REQUIRE(r);
  CHECK(to_string(r->at(t.at("x")), t) == "h(y)");
  CHECK(to_string(r->at(t.at("z")), t) == "h(h(y))");
  CHECK_FALSE(naive_unify(term(g, "f(x,a)"), term(g, "f(b,x)"), t));
}

TEST_CASE("naive matching") {
  Grammar g = intro_sig();
  const SymbolTable& t = g.symbols();
  auto r = naive_match(term(g, "x"), term(g, "f(a,b)"), t);
  REQUIRE(r);
  CHECK(to_string(r->at(t.at("x")), t) == "f(a,b)");
  CHECK_FALSE(naive_match(term(g, "f(x,x)"), term(g, "f(a,b)"), t));
  r = naive_match(term(g, "f(x,h(y))"), term(g, "f(a,h(b))"), t);
  REQUIRE(r);
  CHECK(to_string(*r, t) == "{x -> a, y -> b}");
}

TEST_CASE("brute force context matching on the introductory instances") {
  Grammar g = intro_sig();
  const SymbolTable& t = g.symbols();
  ExplicitTerm target = term(g, "f(g(a,b),g(a,h(b)))");
  auto sols = brute_context_match({{term(g, "F(a)"), target}}, t);
  REQUIRE(sols.size() == 2);
  std::vector<std::string> got;
  for (auto& s : sols) got.push_back(to_string(s.at(t.at("F")), t));
  std::sort(got.begin(), got.end());
  CHECK(got[0] == "f(g([],b),g(a,h(b)))");
  CHECK(got[1] == "f(g(a,b),g([],h(b)))");

  sols = brute_context_match({{term(g, "f(F(b),F(h(b)))"), target}}, t);
  REQUIRE(sols.size() == 1);
  CHECK(to_string(sols[0].at(t.at("F")), t) == "g(a,[])");

  CHECK(brute_context_match({{term(g, "f(F(b),F(b))"), target}}, t).empty());
}

TEST_CASE("substitution application") {
  Grammar g = intro_sig();
  const SymbolTable& t = g.symbols();
  ExplicitTerm s = term(g, "f(x,y)");
  CHECK(apply({}, s) == s);
  CHECK(to_string(apply({{t.at("x"), term(g, "a")}}, s), t) == "f(a,y)");
  CHECK(to_string(apply({{t.at("F"), term(g, "g(a,[])")}}, term(g, "F(b)")), t) == "g(a,b)");
  CHECK(to_string(fill(term(g, "h([])"), term(g, "h([])")), t) == "h(h([]))");
}

TEST_CASE("canonical keys ignore variable names") {
  Grammar g = intro_sig();
  const SymbolTable& t = g.symbols();
  CHECK(canonical_key({term(g, "f(x,y)")}, t) == canonical_key({term(g, "f(y,z)")}, t));
  CHECK(canonical_key({term(g, "f(x,x)")}, t) != canonical_key({term(g, "f(x,y)")}, t));
}
