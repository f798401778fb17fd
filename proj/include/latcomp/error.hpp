#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latcomp {

// Machine-readable failure classes. The CLI maps each one to its own exit
// code and the HTTP service maps them to status codes.
enum class ErrorCategory {
  Io,
  Config,
  OutOfRange,
  NoConvergence,
  Degenerate,
};

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Io: return "IO";
    case ErrorCategory::Config: return "Config";
    case ErrorCategory::OutOfRange: return "OutOfRange";
    case ErrorCategory::NoConvergence: return "NoConvergence";
    case ErrorCategory::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Thrown by the fixed-point solvers when max_iter is exhausted.
class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual)
      : Error(ErrorCategory::NoConvergence,
              "fixed-point solve did not converge after " + std::to_string(iterations) +
                  " iterations (final residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

[[noreturn]] inline void config_error(const std::string& msg) {
  throw Error(ErrorCategory::Config, msg);
}

}  // namespace latcomp
