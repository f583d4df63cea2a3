#pragma once

#include <stdexcept>

namespace cordet {

/// Input that is valid in type but lies on a probability-zero degenerate
/// set, e.g. an all-zero database row that cannot be normalized.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form quantity that is infinite at the requested parameters
/// (typically rho^2 = 1 in a second-moment expression).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cordet
