#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgdlab {

enum class ErrorCode {
  validation,
  dimension_mismatch,
  numerical,
  singular,
  asymmetric,
  not_stochastic,
  zero_diagonal,
  disconnected,
  not_strongly_convex,
  not_in_class,
  radius_undefined,
  invalid_schedule,
  unsupported,
  config,
  io,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported as an Error carrying a stable code; the
// CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dgdlab
