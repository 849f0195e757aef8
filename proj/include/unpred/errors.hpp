#pragma once

#include <stdexcept>
#include <string>

namespace unpred {

// Failure categories. The CLI maps each category to its own exit code.

/// A caller-supplied value violates a documented precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its contract (non-hyperbolic
/// matrix, singular pivot, stability guard, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, std::size_t pivot)
      : NumericalError(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// A signal or solution was queried outside the time range it covers.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Exit codes used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitDomain = 4;

/// Throws ConfigError with `"<module>: " + message` unless `condition` holds.
void require(bool condition, const char* module, const std::string& message);

}  // namespace unpred
