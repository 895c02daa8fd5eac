#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mapple {

enum class Errc {
  InvalidArgument,
  // processor-space algebra
  NonDivisibleSplit,
  DimOutOfRange,
  BadDimOrder,
  BadSliceBounds,
  ProductMismatch,
  IndexOutOfRange,
  Overflow,
  // decompose / commvol
  ShapeMismatch,
  NoFeasibleFactorization,
  TooLarge,
  // dsl
  SyntaxError,
  DuplicateFunction,
  EvalError,
  NoBinding,
  // tasksim
  EmptyTask,
  SchemaError,
  CyclicDependence,
  MultipleRoots,
  Stuck,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Checked integer arithmetic. Index math must never wrap silently.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "integer addition overflows");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(Errc::Overflow, "integer subtraction overflows");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "integer multiplication overflows");
  return r;
}

// Floor division and the matching non-negative (for positive divisors) remainder.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw Error(Errc::EvalError, "division by zero");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
    throw Error(Errc::Overflow, "integer division overflows");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw Error(Errc::EvalError, "modulo by zero");
  if (b == -1) return 0;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

}  // namespace mapple
