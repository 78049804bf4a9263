#include "conehull/error.hpp"

namespace conehull {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::AcceptanceTooLow: return "AcceptanceTooLow";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NonSimplicialFacet: return "NonSimplicialFacet";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace conehull
