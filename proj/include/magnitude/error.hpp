#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magnitude {

enum class ErrorCode {
  invalid_argument,
  duplicate_points,
  ill_conditioned,
  not_homogeneous,
  unsupported_shape,
  missing_cell_volume,
  table_format,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::duplicate_points: return "duplicate_points";
    case ErrorCode::ill_conditioned: return "ill_conditioned";
    case ErrorCode::not_homogeneous: return "not_homogeneous";
    case ErrorCode::unsupported_shape: return "unsupported_shape";
    case ErrorCode::missing_cell_volume: return "missing_cell_volume";
    case ErrorCode::table_format: return "table_format";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Base exception for everything the library reports. The code lets the CLI
/// map failures onto distinct exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the residual gate. Carries the offending residual.
class IllConditionedError : public Error {
 public:
  explicit IllConditionedError(double residual)
      : Error(ErrorCode::ill_conditioned,
              "ill-conditioned system: residual_inf=" + std::to_string(residual)),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

namespace detail {

inline void require(bool condition, const std::string& message,
                    ErrorCode code = ErrorCode::invalid_argument) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace magnitude
