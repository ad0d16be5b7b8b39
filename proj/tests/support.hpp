#pragma once

#include <string>
#include <string_view>

#include "tgram/grammar.hpp"
#include "tgram/term.hpp"

namespace support {

inline tgram::Id id(const tgram::Grammar& g, std::string_view name) { return g.symbols().at(name); }

inline std::string show(const tgram::Grammar& g, tgram::Id n) {
  return tgram::to_string(tgram::derive_term(g, n), g.symbols());
}
inline std::string show(const tgram::Grammar& g, std::string_view name) { return show(g, id(g, name)); }

inline tgram::ExplicitTerm term(const tgram::Grammar& g, std::string_view text) {
  return tgram::parse_term(text, g.symbols());
}

inline std::string str(tgram::count_t v) { return tgram::to_string(v); }

}  // namespace support
