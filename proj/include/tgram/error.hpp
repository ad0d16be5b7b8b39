#pragma once

#include <stdexcept>
#include <string>

#include "tgram/count.hpp"

namespace tgram {

enum class ErrorCode {
  parse,
  invalid_argument,
  invalid_position,
  index_out_of_range,
  size_limit_exceeded,
  not_a_lambda_set,
  empty_word_rule,
  hole_path_exceeded,
  undefined_extension,
  occurs_violation,
  invalid_extension,
  position_not_found,
  overflow,
  too_many_context_variables,
  internal,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure that is not a legitimate outcome of an operation.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by decompression when the result would exceed the caller's guard.
class SizeLimitExceeded : public Error {
 public:
  SizeLimitExceeded(count_t true_size, count_t limit)
      : Error(ErrorCode::size_limit_exceeded,
              "decompression needs " + to_string(true_size) + " nodes, limit is " + to_string(limit)),
        true_size_(true_size) {}

  count_t true_size() const noexcept { return true_size_; }

 private:
  count_t true_size_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

#define TGRAM_ASSERT(cond, msg)                                                        \
  do {                                                                                 \
    if (!(cond)) ::tgram::fail(::tgram::ErrorCode::internal, std::string("internal: ") + (msg)); \
  } while (false)

}  // namespace tgram
