#include "tgram/count.hpp"

#include <algorithm>

#include "tgram/error.hpp"

namespace tgram {

std::string to_string(count_t v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

count_t parse_count(const std::string& text) {
  if (text.empty()) fail(ErrorCode::parse, "expected a number");
  count_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') fail(ErrorCode::parse, "not a number: '" + text + "'");
    count_t d = static_cast<count_t>(c - '0');
    if (v > (count_max - d) / 10) fail(ErrorCode::overflow, "number too large: " + text);
    v = v * 10 + d;
  }
  return v;
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_position: return "invalid-position";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::size_limit_exceeded: return "size-limit-exceeded";
    case ErrorCode::not_a_lambda_set: return "not-a-lambda-set";
    case ErrorCode::empty_word_rule: return "empty-word-rule";
    case ErrorCode::hole_path_exceeded: return "hole-path-exceeded";
    case ErrorCode::undefined_extension: return "undefined-extension";
    case ErrorCode::occurs_violation: return "occurs-violation";
    case ErrorCode::invalid_extension: return "invalid-extension";
    case ErrorCode::position_not_found: return "position-not-found";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::too_many_context_variables: return "too-many-context-variables";
    case ErrorCode::internal: return "internal";
  }
  return "?";
}

}  // namespace tgram
