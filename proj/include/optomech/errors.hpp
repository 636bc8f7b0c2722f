#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optomech {

enum class ErrorKind {
  invalid_parameter,
  degenerate_expansion,
  no_physical_root,
  near_singular_softening,
  no_steady_state,
  invalid_covariance,
  internal_consistency,
  configuration,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::degenerate_expansion: return "degenerate-expansion";
    case ErrorKind::no_physical_root: return "no-physical-root";
    case ErrorKind::near_singular_softening: return "near-singular-softening";
    case ErrorKind::no_steady_state: return "no-steady-state";
    case ErrorKind::invalid_covariance: return "invalid-covariance";
    case ErrorKind::internal_consistency: return "internal-consistency";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers (the sweep
/// engine, the CLI) can map it to a row error or an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace optomech
