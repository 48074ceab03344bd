#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace subdiff {

enum class ErrorKind {
  invalid_params,
  evaluation_failure,
  unsupported_operator,
  conditioning,
  solver,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. `mode()` is the 1-based mode index when the
/// failure is attributable to a single spectral mode.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> mode = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> mode() const noexcept { return mode_; }

  /// Same error with a mode index attached (keeps an existing one).
  Error with_mode(std::size_t mode) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> mode_;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace subdiff
