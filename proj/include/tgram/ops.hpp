#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tgram/grammar.hpp"

namespace tgram {

/// Word grammar of preorder traversals. For a term non-terminal A of the base,
/// P[A] generates pre(w_A); for a context C, L[C] and R[C] generate the parts
/// left and right of the hole.
struct PreGrammar {
  Grammar grammar;
  std::vector<Id> P, L, R;  // indexed by base id, no_id where not applicable
};

PreGrammar build_pre(const Grammar& g);

/// Word grammar of hole paths over digit terminals d1..dM.
struct HoleGrammar {
  Grammar grammar;
  std::vector<Id> H;      // indexed by base id
  std::vector<Id> digit;  // digit[i] is the terminal for child index i (1-based)
};

HoleGrammar build_hole(const Grammar& g);

/// A grammar plus the non-terminal a construction produced.
struct Extension {
  Grammar grammar;
  Id result = no_id;
  std::size_t added = 0;  // new non-terminals
};

/// The extension constructions, applied in place. Only new non-terminals are
/// ever defined, so every old non-terminal keeps its word.
class Extender {
 public:
  explicit Extender(Grammar& g) : g_(g) {}

  /// Non-terminal generating w_N|_{iPos(w_N, k)}; may be a context.
  Id kext(Id n, count_t k);
  /// Prefix of context C with hole path length l.
  Id pref(Id c, count_t l);
  /// Suffix of context C after the first l hole-path steps.
  Id suff(Id c, count_t l);
  /// Prefix context of w_A with hole path p.
  Id pcon(Id a, const Position& p);
  /// JointCon(w_A, w_B, l). With a target context variable, the top rule is
  /// bound to it instead of a fresh non-terminal. Without `canonical`, equal
  /// children are found by compressed equality instead of identity.
  Id joint_cg(Id a, Id b, count_t l, Id target = no_id, bool canonical = true);

  /// Context non-terminal whose rule is the application at hole-path depth l.
  Id hole_node(Id c, count_t l) const;
  /// The (l+1)-th step of hp(w_C), 1-based child index.
  std::uint32_t hole_step(Id c, count_t l) const;
  /// Length of the longest common prefix of hp(w_C) and p[from..].
  std::size_t common_hole_prefix(Id c, const Position& p, std::size_t from) const;

  std::size_t added() const noexcept { return added_; }
  Grammar& grammar() noexcept { return g_; }

 private:
  Id make(SymbolKind kind, Rule rule, Id target = no_id);
  Id empty_hole();

  Grammar& g_;
  std::size_t added_ = 0;
  Id empty_ = no_id;
  std::map<std::pair<Id, count_t>, Id> kext_memo_, pref_memo_, suff_memo_;
};

Extension kext(const Grammar& g, Id n, count_t k);
Extension pref(const Grammar& g, Id c, count_t l);
Extension suff(const Grammar& g, Id c, count_t l);
Extension pcon(const Grammar& g, Id a, const Position& p);
Extension joint_cg(const Grammar& g, Id a, Id b, count_t l);

/// F becomes a context non-terminal generating JointCon(w_A, w_B, l).
/// Returns the number of new non-terminals, F included.
std::size_t joint_cgf(Grammar& g, Id f, Id a, Id b, count_t l, bool canonical = true);

/// x -> A. Throws occurs_violation when x occurs in w_A.
void bind_var(Grammar& g, Id x, Id a);

}  // namespace tgram
