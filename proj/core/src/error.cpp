#include "ineqgcc/error.hpp"

namespace ineqgcc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::SingularWeight: return "singular-weight";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace ineqgcc
