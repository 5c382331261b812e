#pragma once

#include <stdexcept>
#include <string>

namespace blowuplab {

enum class ErrorKind {
  InvalidProblem,
  InvalidMesh,
  InvalidPartition,
  Precondition,
  Domain,
  Convergence,
  NotApplicable,
  InsufficientData,
  InconclusiveEstimate,
  UndefinedScale,
  Construction,
  Placement,
  Range,
  Solver,
  Io,
  Config,
  Usage,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind distinguishes the failure class.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Raised by the iterative estimators; carries the last objective value reached.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& message, double last_value, int iterations);

  [[nodiscard]] double last_value() const noexcept { return last_value_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
  double last_value_;
  int iterations_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message)
{
  if (!condition) {
    throw Error(kind, message);
  }
}

}  // namespace blowuplab
