#pragma once

#include <stdexcept>
#include <string>

namespace sdfo {

/// Bad argument or violated precondition (dimension mismatch, out-of-range
/// parameter, malformed configuration).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trust-region step of zero length: the acceptance ratio is undefined.
class DegenerateStepError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested analysis needs problem data the problem does not declare.
class UnsupportedProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdfo
