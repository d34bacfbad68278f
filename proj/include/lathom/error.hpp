#ifndef LATHOM_ERROR_HPP
#define LATHOM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lathom {

enum class ErrorKind {
  InvalidGraph,
  UnknownNode,
  DisconnectedGraph,
  EmptyWindow,
  InvalidDirection,
  NoConvergence,
  TooLarge,
  WindowTooSmall,
  CellOutOfWindow,
  DatumUndefined,
  EmptyInterior,
  UnsupportedDimension,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGraph: return "InvalidGraph";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::InvalidDirection: return "InvalidDirection";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::CellOutOfWindow: return "CellOutOfWindow";
    case ErrorKind::DatumUndefined: return "DatumUndefined";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library error. `kind()` identifies the failure class; the message carries
/// the details (offending node, achieved residual, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Solver ran out of iterations; the achieved residual is kept for reporting.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, double residual)
      : Error(ErrorKind::NoConvergence, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace lathom

#endif  // LATHOM_ERROR_HPP
