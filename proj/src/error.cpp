#include "blowuplab/error.hpp"

namespace blowuplab {

const char* to_string(ErrorKind kind)
{
  switch (kind) {
  case ErrorKind::InvalidProblem: return "invalid-problem";
  case ErrorKind::InvalidMesh: return "invalid-mesh";
  case ErrorKind::InvalidPartition: return "invalid-partition";
  case ErrorKind::Precondition: return "precondition";
  case ErrorKind::Domain: return "domain";
  case ErrorKind::Convergence: return "convergence";
  case ErrorKind::NotApplicable: return "not-applicable";
  case ErrorKind::InsufficientData: return "insufficient-data";
  case ErrorKind::InconclusiveEstimate: return "inconclusive-estimate";
  case ErrorKind::UndefinedScale: return "undefined-scale";
  case ErrorKind::Construction: return "construction";
  case ErrorKind::Placement: return "placement";
  case ErrorKind::Range: return "range";
  case ErrorKind::Solver: return "solver";
  case ErrorKind::Io: return "io";
  case ErrorKind::Config: return "config";
  case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind)
{
}

ConvergenceError::ConvergenceError(const std::string& message, double last_value, int iterations)
    : Error(ErrorKind::Convergence, message), last_value_(last_value), iterations_(iterations)
{
}

}  // namespace blowuplab
