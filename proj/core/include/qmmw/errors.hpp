#pragma once

#include <stdexcept>
#include <string>

namespace qmmw {

/// Input violates a structural invariant (non-Hermitian, not a density, bad game).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operands have incompatible dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Function evaluated outside its domain (e.g. log of a singular matrix).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Step-size / sampling-radius schedule is infeasible for the game geometry.
class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qmmw
