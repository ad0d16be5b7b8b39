#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tgram/grammar.hpp"
#include "tgram/ops.hpp"

namespace tgram {

/// Word grammar in Chomsky normal form: every rule is `N -> a` or `N -> N1 N2`.
/// Word non-terminals of g that derive the empty word are dropped; an explicit
/// root that derives it throws empty_word_rule.
Grammar to_cnf(const Grammar& g, const std::vector<Id>& roots);

struct Diff {
  enum class Kind { index, equal, proper_prefix };
  Kind kind = Kind::equal;
  count_t index = 0;  // first differing position (1-based), or |shorter|+1 for prefixes
  bool first_shorter = false;
};

/// Occurrence queries over the word non-terminals of a grammar.
///
/// Words are Karp-Rabin fingerprinted modulo 2^61-1 under two seeded bases.
/// Windows of up to `confirm_limit` symbols are confirmed by explicit
/// comparison; longer windows trust the fingerprints. The grammar may grow
/// while the index lives, but existing rules must not change.
class OccurrenceIndex {
 public:
  static constexpr count_t confirm_limit = 4096;

  explicit OccurrenceIndex(const Grammar& g, std::uint64_t seed = 0x7f4a7c15u);

  count_t length(Id n) const;
  /// Does w_{n1} occur in w_{n2} at position k (1-based)?
  bool occurs(Id n1, Id n2, count_t k) const;
  bool equal(Id n1, Id n2) const;
  Id char_at(Id n, count_t k) const;
  /// Index of the first difference, descending the normal form of n1.
  Diff first_diff(Id n1, Id n2) const;
  /// Smallest k with w_n[k] an unbound variable.
  std::optional<count_t> first_var_index(Id n) const;

  /// Height of the normal form of n; bounds the queries of one first_diff.
  std::uint32_t cnf_depth(Id n) const;

  std::uint64_t queries() const noexcept { return queries_; }
  std::uint64_t last_diff_queries() const noexcept { return last_diff_queries_; }

 private:
  struct Node {
    std::int64_t left = -1, right = -1;  // both -1 for a leaf
    Id symbol = no_id;
    count_t len = 0;
    std::uint64_t h1 = 0, h2 = 0, p1 = 1, p2 = 1;  // fingerprint and base^len
    std::uint32_t depth = 0;
    bool has_var = false;
  };
  struct Hash {
    std::uint64_t h1 = 0, h2 = 0, p1 = 1, p2 = 1;
  };

  static constexpr std::int64_t empty = -1;

  std::int64_t node_of(Id n) const;
  std::int64_t leaf(Id symbol) const;
  std::int64_t pair(std::int64_t a, std::int64_t b) const;
  Hash range_hash(std::int64_t node, count_t start, count_t len) const;
  void extract(std::int64_t node, count_t start, count_t len, std::vector<Id>& out) const;
  bool window_equal(std::int64_t a, count_t sa, std::int64_t b, count_t sb, count_t len) const;

  const Grammar& g_;
  std::uint64_t b1_, b2_;
  mutable std::vector<Node> nodes_;
  mutable std::vector<std::int64_t> of_;  // per symbol id; -2 unknown
  mutable std::vector<std::int64_t> leaf_;
  mutable std::uint64_t queries_ = 0;
  mutable std::uint64_t last_diff_queries_ = 0;
};

OccurrenceIndex build_index(const Grammar& g);

bool eq_words(const Grammar& g, Id n1, Id n2);
bool eq_terms(const Grammar& g, Id a, Id b);
/// Same, reusing a preorder grammar and its index.
bool eq_terms(const PreGrammar& pre, const OccurrenceIndex& index, Id a, Id b);

}  // namespace tgram
