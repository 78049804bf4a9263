#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conehull {

enum class ErrorKind {
  InvalidArgument,
  DimensionTooLarge,
  SingularCovariance,
  IllConditioned,
  AcceptanceTooLow,
  ZeroVector,
  DegenerateInput,
  NonSimplicialFacet,
  BudgetExceeded,
  Degenerate,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the experiment driver) can decide whether to skip a trial
/// or abort.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace conehull
