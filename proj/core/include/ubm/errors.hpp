#pragma once

#include <stdexcept>
#include <string>

namespace ubm {

enum class ErrorCode {
  invalid_dimension,
  invalid_input,
  invalid_grid,
  contract_violation,
  numeric,
  cap_exceeded,
  invalid_quantile,
  invalid_order,
  precision_loss,
  domain,
};

const char* to_string(ErrorCode code) noexcept;

/// Base error for every failure raised by the library. The code lets callers
/// (the CLI in particular) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by moment evaluation when the certified error bound is not met.
class PrecisionLossError : public Error {
 public:
  PrecisionLossError(const std::string& what, double achieved_bound)
      : Error(ErrorCode::precision_loss, what), achieved_bound_(achieved_bound) {}

  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ubm
