#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tgram {

/// Index into a SymbolTable. Terminals and non-terminals share one id space so
/// that a variable can turn into a non-terminal without being renamed.
using Id = std::uint32_t;

inline constexpr Id no_id = ~Id{0};

/// Every table reserves id 0 for the hole constant.
inline constexpr Id hole_id = 0;

enum class SymbolKind : std::uint8_t {
  hole,
  function,
  variable,          // first-order variable, arity 0, still a terminal
  context_variable,  // arity 1, still a terminal
  term_nt,
  context_nt,
  word_nt,
};

/// Which kind of variable a symbol started out as. Survives binding, when the
/// symbol's kind changes to a non-terminal kind.
enum class VarSort : std::uint8_t { none, first_order, context };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::function;
  std::uint32_t arity = 0;
  VarSort var = VarSort::none;

  bool operator==(const Symbol&) const = default;
};

const char* to_string(SymbolKind kind) noexcept;

bool is_valid_identifier(std::string_view name) noexcept;

class SymbolTable {
 public:
  SymbolTable();

  Id declare_function(const std::string& name, std::uint32_t arity);
  /// arity 0 declares a first-order variable, arity 1 a context variable.
  Id declare_variable(const std::string& name, std::uint32_t arity);
  Id declare_nonterminal(const std::string& name, SymbolKind kind);
  /// A non-terminal named `<prefix>_<n>` that does not collide with any name in
  /// the table. The counter is monotone per table.
  Id fresh_nonterminal(std::string_view prefix, SymbolKind kind);

  /// Turns an unbound variable into the non-terminal kind matching its arity.
  void make_nonterminal(Id variable);

  Id find(std::string_view name) const noexcept;
  /// Throws Error(parse) for unknown names.
  Id at(std::string_view name) const;

  const Symbol& operator[](Id id) const { return symbols_[id]; }
  std::size_t size() const noexcept { return symbols_.size(); }

  const std::string& name(Id id) const { return symbols_[id].name; }
  SymbolKind kind(Id id) const { return symbols_[id].kind; }
  std::uint32_t arity(Id id) const { return symbols_[id].arity; }

  bool is_terminal(Id id) const noexcept;
  bool is_nonterminal(Id id) const noexcept { return !is_terminal(id); }
  bool is_function(Id id) const noexcept { return symbols_[id].kind == SymbolKind::function; }
  /// An unbound variable of either sort (still a terminal).
  bool is_free_variable(Id id) const noexcept;
  bool is_first_order_variable(Id id) const noexcept {
    return symbols_[id].kind == SymbolKind::variable;
  }
  bool is_context_variable(Id id) const noexcept {
    return symbols_[id].kind == SymbolKind::context_variable;
  }
  /// Variable of the original problem, bound or not.
  bool was_variable(Id id) const noexcept { return symbols_[id].var != VarSort::none; }

 private:
  Id add(Symbol symbol);

  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, Id> by_name_;
  std::uint64_t fresh_counter_ = 0;
};

}  // namespace tgram
