#pragma once

#include <cstdint>
#include <limits>
#include <string>

namespace tgram {

/// Word sizes, heights and preorder indices. Grammar-generated objects reach
/// 2^|G|, so everything is 128-bit and saturates instead of wrapping.
using count_t = unsigned __int128;

inline constexpr count_t count_max = std::numeric_limits<count_t>::max();

constexpr count_t sat_add(count_t a, count_t b) noexcept {
  return a > count_max - b ? count_max : a + b;
}

constexpr count_t sat_sub(count_t a, count_t b) noexcept { return a < b ? 0 : a - b; }

constexpr count_t sat_mul(count_t a, count_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  return a > count_max / b ? count_max : a * b;
}

constexpr bool saturated(count_t v) noexcept { return v == count_max; }

std::string to_string(count_t v);

/// Parses a non-negative decimal; throws tgram::Error on malformed input.
count_t parse_count(const std::string& text);

/// 2^e, saturating.
constexpr count_t pow2(unsigned e) noexcept { return e >= 128 ? count_max : count_t{1} << e; }

}  // namespace tgram
