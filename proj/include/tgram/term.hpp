#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgram/count.hpp"
#include "tgram/symbols.hpp"

namespace tgram {

/// Sequence of 1-based child indices; empty is the root.
using Position = std::vector<std::uint32_t>;

std::string to_string(const Position& p);
Position parse_position(std::string_view text);

/// An uncompressed term stored as its preorder node list. Contexts are terms
/// with exactly one hole node. Nothing here recurses on term depth, so terms
/// as deep as the decompression guard are fine.
class ExplicitTerm {
 public:
  struct Node {
    Id symbol = hole_id;
    std::uint32_t arity = 0;
    bool operator==(const Node&) const = default;
  };

  ExplicitTerm() = default;
  /// Throws invalid_argument unless the arities describe exactly one tree.
  explicit ExplicitTerm(std::vector<Node> preorder);

  static ExplicitTerm constant(Id symbol);
  static ExplicitTerm hole() { return constant(hole_id); }
  static ExplicitTerm apply(Id symbol, const std::vector<ExplicitTerm>& children);

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  Id symbol(std::size_t i) const { return nodes_[i].symbol; }
  std::uint32_t arity(std::size_t i) const { return nodes_[i].arity; }
  Id root() const { return nodes_.front().symbol; }

  /// One past the last node of the subtree rooted at node i.
  std::size_t end(std::size_t i) const { return ends_[i]; }
  /// Node index of the j-th child (1-based) of node i.
  std::size_t child(std::size_t i, std::uint32_t j) const;
  ExplicitTerm subtree(std::size_t i) const;
  /// Copy with the subtree at node i replaced.
  ExplicitTerm replace(std::size_t i, const ExplicitTerm& by) const;

  std::size_t height() const;
  std::size_t count(Id symbol) const;
  bool contains(Id symbol) const { return count(symbol) > 0; }

  bool operator==(const ExplicitTerm& o) const { return nodes_ == o.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<std::size_t> ends_;
};

std::vector<Id> preorder(const ExplicitTerm& t);

/// 0-based node index of position p; throws invalid_position.
std::size_t node_at(const ExplicitTerm& t, const Position& p);
/// Position of a 0-based node index.
Position position_of(const ExplicitTerm& t, std::size_t node);

count_t pindex(const ExplicitTerm& t, const Position& p);
/// Throws index_out_of_range unless 1 <= k <= size(t).
Position ipos(const ExplicitTerm& t, count_t k);
bool is_position(const ExplicitTerm& t, const Position& p);
ExplicitTerm subterm(const ExplicitTerm& t, const Position& p);

bool is_context(const ExplicitTerm& t);
/// Throws invalid_argument if t is not a context.
Position hole_path(const ExplicitTerm& t);
/// C[s]: the hole of C replaced by s.
ExplicitTerm fill(const ExplicitTerm& context, const ExplicitTerm& s);
/// t with the subterm at p replaced by the hole.
ExplicitTerm prefix_context(const ExplicitTerm& t, const Position& p);

/// Common prefix context of u and v whose hole path has length l, if any.
std::optional<ExplicitTerm> joint_con(const ExplicitTerm& u, const ExplicitTerm& v, std::size_t l);

/// Variables map to terms, context variables to contexts.
using Substitution = std::map<Id, ExplicitTerm>;

ExplicitTerm apply(const Substitution& sigma, const ExplicitTerm& t);

/// Robinson unification with occurs check; returns an idempotent mgu.
std::optional<Substitution> naive_unify(const ExplicitTerm& s, const ExplicitTerm& t,
                                        const SymbolTable& table);
std::optional<Substitution> naive_match(const ExplicitTerm& s, const ExplicitTerm& t,
                                        const SymbolTable& table);

/// One pattern/target pair; targets must be ground.
using ExplicitEquation = std::pair<ExplicitTerm, ExplicitTerm>;

/// All solutions, found by trying every context of every target for each
/// context variable and matching the rest.
std::vector<Substitution> brute_context_match(const std::vector<ExplicitEquation>& equations,
                                              const SymbolTable& table);

/// Free variables of either sort, in first-occurrence order.
std::vector<Id> variables_of(const ExplicitTerm& t, const SymbolTable& table);
bool is_ground(const ExplicitTerm& t, const SymbolTable& table);

/// Preorder with variables renamed by first occurrence; equal keys mean equal
/// up to variable renaming.
std::string canonical_key(const std::vector<ExplicitTerm>& terms, const SymbolTable& table);

std::string to_string(const ExplicitTerm& t, const SymbolTable& table);
std::string to_string(const Substitution& sigma, const SymbolTable& table);
/// Symbols must already be declared; `[]` is the hole.
ExplicitTerm parse_term(std::string_view text, const SymbolTable& table);

/// Rebuilds t over another table by symbol name.
ExplicitTerm translate(const ExplicitTerm& t, const SymbolTable& from, const SymbolTable& to);
Substitution translate(const Substitution& s, const SymbolTable& from, const SymbolTable& to);

}  // namespace tgram
