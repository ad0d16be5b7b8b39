#include "tgram/symbols.hpp"

#include <cctype>

#include "tgram/error.hpp"

namespace tgram {

const char* to_string(SymbolKind kind) noexcept {
  switch (kind) {
    case SymbolKind::hole: return "hole";
    case SymbolKind::function: return "function";
    case SymbolKind::variable: return "variable";
    case SymbolKind::context_variable: return "context-variable";
    case SymbolKind::term_nt: return "term";
    case SymbolKind::context_nt: return "ctx";
    case SymbolKind::word_nt: return "word";
  }
  return "?";
}

bool is_valid_identifier(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!std::isalpha(head) && head != '_') return false;
  for (char c : name.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_' && c != '\'') return false;
  }
  return true;
}

SymbolTable::SymbolTable() { add(Symbol{"[]", SymbolKind::hole, 0, VarSort::none}); }

Id SymbolTable::add(Symbol symbol) {
  if (by_name_.contains(symbol.name)) {
    fail(ErrorCode::parse, "symbol '" + symbol.name + "' declared twice");
  }
  Id id = static_cast<Id>(symbols_.size());
  by_name_.emplace(symbol.name, id);
  symbols_.push_back(std::move(symbol));
  return id;
}

Id SymbolTable::declare_function(const std::string& name, std::uint32_t arity) {
  if (!is_valid_identifier(name)) fail(ErrorCode::parse, "invalid identifier '" + name + "'");
  return add(Symbol{name, SymbolKind::function, arity, VarSort::none});
}

Id SymbolTable::declare_variable(const std::string& name, std::uint32_t arity) {
  if (!is_valid_identifier(name)) fail(ErrorCode::parse, "invalid identifier '" + name + "'");
  if (arity > 1) fail(ErrorCode::parse, "variable '" + name + "' must have arity 0 or 1");
  return arity == 0 ? add(Symbol{name, SymbolKind::variable, 0, VarSort::first_order})
                    : add(Symbol{name, SymbolKind::context_variable, 1, VarSort::context});
}

Id SymbolTable::declare_nonterminal(const std::string& name, SymbolKind kind) {
  if (!is_valid_identifier(name)) fail(ErrorCode::parse, "invalid identifier '" + name + "'");
  if (kind != SymbolKind::term_nt && kind != SymbolKind::context_nt && kind != SymbolKind::word_nt) {
    fail(ErrorCode::invalid_argument, "not a non-terminal kind");
  }
  return add(Symbol{name, kind, kind == SymbolKind::context_nt ? 1u : 0u, VarSort::none});
}

Id SymbolTable::fresh_nonterminal(std::string_view prefix, SymbolKind kind) {
  std::string name;
  do {
    name = std::string(prefix) + "_" + std::to_string(++fresh_counter_);
  } while (by_name_.contains(name));
  return declare_nonterminal(name, kind);
}

void SymbolTable::make_nonterminal(Id variable) {
  Symbol& s = symbols_[variable];
  if (s.kind == SymbolKind::variable) {
    s.kind = SymbolKind::term_nt;
  } else if (s.kind == SymbolKind::context_variable) {
    s.kind = SymbolKind::context_nt;
  } else {
    fail(ErrorCode::invalid_argument, "'" + s.name + "' is not an unbound variable");
  }
}

Id SymbolTable::find(std::string_view name) const noexcept {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? no_id : it->second;
}

Id SymbolTable::at(std::string_view name) const {
  Id id = find(name);
  if (id == no_id) fail(ErrorCode::parse, "unknown symbol '" + std::string(name) + "'");
  return id;
}

bool SymbolTable::is_terminal(Id id) const noexcept {
  switch (symbols_[id].kind) {
    case SymbolKind::hole:
    case SymbolKind::function:
    case SymbolKind::variable:
    case SymbolKind::context_variable: return true;
    default: return false;
  }
}

bool SymbolTable::is_free_variable(Id id) const noexcept {
  auto k = symbols_[id].kind;
  return k == SymbolKind::variable || k == SymbolKind::context_variable;
}

}  // namespace tgram
