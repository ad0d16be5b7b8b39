#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tgram/count.hpp"
#include "tgram/symbols.hpp"
#include "tgram/term.hpp"

namespace tgram {

enum class Shape : std::uint8_t {
  none,
  apply,      // alpha(N1, ..., Nm); for a context lhs exactly one Ni is a context
  hole,       // []
  compose,    // C1 C2    (head = C1, args = {C2})
  ctx_apply,  // C A      (head = C,  args = {A})
  alias,      // A1       (head = A1)
  word,       // sequence of terminals and word non-terminals (args)
};

struct Rule {
  Shape shape = Shape::none;
  Id head = no_id;
  std::vector<Id> args;

  static Rule apply(Id head, std::vector<Id> args) { return {Shape::apply, head, std::move(args)}; }
  static Rule hole() { return {Shape::hole, no_id, {}}; }
  static Rule compose(Id c1, Id c2) { return {Shape::compose, c1, {c2}}; }
  static Rule ctx_apply(Id c, Id a) { return {Shape::ctx_apply, c, {a}}; }
  static Rule alias(Id a) { return {Shape::alias, a, {}}; }
  static Rule word(std::vector<Id> seq) { return {Shape::word, no_id, std::move(seq)}; }

  bool operator==(const Rule&) const = default;
};

/// A rule as the algorithms see it. Applications headed by a bound variable
/// (now a non-terminal) read as alias, context application or composition.
struct RuleView {
  Shape shape = Shape::none;
  Id head = no_id;
  std::span<const Id> args;

  Id first() const { return head; }
  Id second() const { return args[0]; }
};

/// Lazily computed per-symbol numbers. Everything is saturating 128-bit.
struct SymbolStats {
  count_t size = 0;        // |w_N|; the hole counts as one node
  count_t height = 0;
  count_t hole_depth = 0;  // |hp(w_C)| for contexts
  count_t left = 0;        // preorder length left of the hole
  std::uint32_t depth = 0;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  Id offending = no_id;

  explicit operator bool() const { return ok; }
};

/// Singleton grammar for words, terms and contexts in one rule store. The
/// store accepts anything; validate() decides whether it is a proper grammar.
class Grammar {
 public:
  Grammar();
  Grammar(const Grammar& other);
  Grammar& operator=(const Grammar& other);
  Grammar(Grammar&&) noexcept;
  Grammar& operator=(Grammar&&) noexcept;
  ~Grammar();

  const SymbolTable& symbols() const noexcept { return table_; }

  Id declare_function(const std::string& name, std::uint32_t arity);
  Id declare_variable(const std::string& name, std::uint32_t arity);
  Id declare_nonterminal(const std::string& name, SymbolKind kind);
  /// `base` if free, else `base_<n>`.
  Id declare_unique(const std::string& base, SymbolKind kind);
  Id fresh(std::string_view prefix, SymbolKind kind);

  /// Attaches a rule; a second definition is kept aside as a singleton breach.
  void define(Id nt, Rule rule);
  Id add_rule(std::string_view prefix, SymbolKind kind, Rule rule);
  /// Overwrites an existing rule. Breaks every guarantee about old words;
  /// meant for building broken grammars on purpose.
  void replace_rule(Id nt, Rule rule);
  /// Turns a free variable into a non-terminal defined by `rule`.
  void bind(Id variable, Rule rule);

  bool has_rule(Id id) const { return id < rules_.size() && rules_[id].shape != Shape::none; }
  const Rule& rule(Id id) const;
  RuleView view(Id id) const;

  std::size_t symbol_count() const noexcept { return table_.size(); }
  /// Non-terminals that have a rule, in id order.
  std::vector<Id> nonterminals() const;
  std::size_t rule_count() const noexcept { return rule_count_; }
  /// Sum over rules of 1 + |rhs|, the hole counting as one symbol.
  count_t size() const;
  std::uint32_t depth() const;

  const std::vector<std::pair<Id, Rule>>& extra_definitions() const noexcept { return extra_; }

  const SymbolStats& stats(Id id) const;
  count_t word_size(Id id) const { return stats(id).size; }
  count_t height(Id id) const { return stats(id).height; }
  count_t hole_depth(Id id) const { return stats(id).hole_depth; }
  count_t left_size(Id id) const { return stats(id).left; }
  std::uint32_t depth(Id id) const { return stats(id).depth; }

  /// For a context rule viewed as an application: 1-based index of the context argument.
  std::uint32_t context_arg(const RuleView& v) const;

  const std::string& name(Id id) const { return table_.name(id); }
  SymbolKind kind(Id id) const { return table_.kind(id); }

 private:
  void grow();
  void invalidate();
  void compute(Id id) const;

  SymbolTable table_;
  std::vector<Rule> rules_;
  std::size_t rule_count_ = 0;
  std::vector<std::pair<Id, Rule>> extra_;

  struct Cache;
  mutable std::unique_ptr<Cache> cache_;
};

std::size_t rule_size(const Rule& r);

ValidationReport validate(const Grammar& g);

/// Non-terminals with rules, children before parents. Throws internal on a cycle.
std::vector<Id> topo_order(const Grammar& g);
/// Non-terminal children of a rule view, in order.
std::vector<Id> children(const Grammar& g, Id nt);

/// Only the function-symbol rules of term non-terminals: a dag.
bool is_dag(const Grammar& g);

/// True iff alpha occurs in w_N.
bool occurs_terminal(const Grammar& g, Id alpha, Id n);
/// Marks, per symbol id, whether any free variable (of either sort) occurs in w.
std::vector<char> variable_presence(const Grammar& g);
bool is_ground(const Grammar& g, Id n);

struct Heights {
  count_t height = 0;
  std::optional<count_t> hole_depth;
};
Heights heights(const Grammar& g, Id n);

inline constexpr count_t default_max_size = 1'000'000;

ExplicitTerm derive_term(const Grammar& g, Id n, count_t max_size = default_max_size);
std::vector<Id> derive_word(const Grammar& g, Id n, count_t max_size = default_max_size);

/// Non-terminals reachable from `roots` (roots included), in id order.
std::vector<Id> reachable(const Grammar& g, const std::vector<Id>& roots);

struct Restricted {
  Grammar grammar;
  std::unordered_map<Id, Id> map;  // old id -> new id
};
/// The reachable part; terminals are all kept.
Restricted restriction(const Grammar& g, const std::vector<Id>& roots);

/// Throws not_a_lambda_set if some term non-terminal of V lacks a lambda rule.
std::uint32_t vdepth(const Grammar& g, const std::unordered_set<Id>& v, Id n);
std::vector<std::uint32_t> vdepth_all(const Grammar& g, const std::unordered_set<Id>& v);

/// Merges non-terminals generating equal terms. Input must be a dag.
Restricted canonical_dag(const Grammar& g);

/// Text format.
Grammar parse_grammar(std::string_view text);
Grammar load_grammar(const std::string& path);
std::string to_string(const Grammar& g);
std::string rule_to_string(const Grammar& g, Id nt);
std::string rule_rhs_to_string(const Grammar& g, const Rule& r);

/// Same symbols and same rules, compared by name.
bool same_grammar(const Grammar& a, const Grammar& b);

}  // namespace tgram
