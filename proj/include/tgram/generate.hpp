#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "tgram/grammar.hpp"
#include "tgram/term.hpp"

namespace tgram {

/// Every random choice in the library goes through one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[uniform(0, v.size() - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

/// Symbols declared in a grammar for random terms.
struct Signature {
  std::vector<Id> constants;
  std::vector<Id> functions;  // arity >= 1
  std::vector<Id> variables;
  std::vector<Id> context_variables;
};

/// a b c / g/1 f/2 h/3, variables x1.., context variables F1..
Signature declare_signature(Grammar& g, std::size_t variables, std::size_t context_variables);

struct TermShape {
  std::size_t max_depth = 5;
  double leaf = 0.3;        // chance of stopping early
  double variable = 0.0;    // chance that a leaf is a variable
  double context = 0.0;     // chance that an inner node is a context variable
};

ExplicitTerm random_term(Rng& rng, const Signature& sig, const TermShape& shape);
/// A ground term with one leaf replaced by the hole (or just the hole).
ExplicitTerm random_context(Rng& rng, const Signature& sig, std::size_t max_depth);

struct EncodeOptions {
  bool dag_only = false;   // plain applications only
  double context = 0.3;    // chance a node starts a context application
  double compose = 0.5;    // chance a context splits by composition
  double alias = 0.1;      // chance of a lambda rule
  double share = 0.8;      // chance equal subterms reuse a non-terminal
};

/// Adds rules for terms to one grammar, sharing across calls.
class Encoder {
 public:
  Encoder(Grammar& g, Rng& rng, EncodeOptions opt) : g_(g), rng_(rng), opt_(opt) {}
  Id encode(const ExplicitTerm& t);

 private:
  Id node(const ExplicitTerm& t, std::size_t i, const std::vector<std::uint64_t>& keys);
  Id context(const ExplicitTerm& t, const std::vector<std::pair<std::size_t, std::uint32_t>>& path,
             std::size_t from, std::size_t to, const std::vector<std::uint64_t>& keys);

  Grammar& g_;
  Rng& rng_;
  EncodeOptions opt_;
  std::map<std::vector<std::uint64_t>, std::uint64_t> intern_;  // (symbol, child keys) -> key
  std::map<std::uint64_t, Id> shared_;
  Id hole_ = no_id;
};

/// Word grammar with `rules` non-terminals over `letters` terminals, each
/// word at most max_len long. Non-terminals may derive the empty word.
Grammar random_word_grammar(Rng& rng, std::size_t letters, std::size_t rules, count_t max_len);

struct StgShape {
  std::size_t rules = 30;
  count_t max_size = 10'000;  // every non-terminal stays within this many nodes
  double context = 0.4;       // share of context-building steps
  double variable = 0.0;      // chance that a leaf rule is a variable
  bool dag = false;           // plain applications only
};

/// Random grammar built bottom-up over `sig`, sharing freely, so words can be
/// exponentially longer than the grammar. Newer non-terminals are preferred as
/// children, which keeps depth growing.
void random_stg(Grammar& g, Rng& rng, const Signature& sig, const StgShape& shape);
/// Same, declaring the default signature into a fresh grammar.
Grammar random_stg(Rng& rng, const StgShape& shape, std::size_t variables = 0);

/// A generated problem. `planted` is a solution by construction when set.
struct Instance {
  Grammar grammar;
  std::vector<std::pair<Id, Id>> equations;
  std::vector<std::pair<ExplicitTerm, ExplicitTerm>> terms;
  Substitution planted;
  bool has_planted = false;
};

struct InstanceShape {
  std::size_t variables = 3;
  std::size_t context_variables = 0;
  std::size_t equations = 1;
  std::size_t max_depth = 4;
  bool dag = false;
};

Instance unify_instance(Rng& rng, const InstanceShape& shape);
Instance match_instance(Rng& rng, const InstanceShape& shape);
Instance cmatch_instance(Rng& rng, const InstanceShape& shape);

/// A_i -> f(A_{i+1}, A_{i+1}) for i < n, A_n -> a. Root A0.
Grammar doubling_terms(std::size_t n);
/// C_i -> C_{i+1} C_{i+1} for i < n, C_n -> g(C), C -> []. Root C0.
Grammar doubling_contexts(std::size_t n);

/// s = h(x1..xn), t = h(f(x0,x0), ..., f(x_{n-1},x_{n-1})), h of arity n.
struct ChainProblem {
  Grammar grammar;
  Id s = no_id;
  Id t = no_id;
};
ChainProblem unify_chain(std::size_t n);

}  // namespace tgram
