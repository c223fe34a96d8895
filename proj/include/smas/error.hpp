#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smas {

/// Error categories surfaced by the library. The API layer maps these onto HTTP statuses.
enum class ErrorCode {
  invalid_argument,
  alignment,
  validation,
  duplicate,
  not_found,
  privacy,
  insufficient_data,
  singular_fit,
  degenerate_model,
  dependency,
  parse,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a regression design is rank deficient. `season` is the hour-of-day
/// sub-model that failed, or -1 outside a seasonal context.
class SingularFitError : public Error {
 public:
  SingularFitError(int season, const std::string& message)
      : Error(ErrorCode::singular_fit, message), season_(season) {}

  [[nodiscard]] int season() const noexcept { return season_; }

 private:
  int season_;
};

}  // namespace smas
