#pragma once

#include <string>
#include <vector>

#include "sdfo/oracle.hpp"

namespace sdfo {

/// Named benchmark objectives.
///
///   sphere            ||x||^2                            n >= 1, smooth
///   rosenbrock        sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2   n >= 2
///   l1norm            ||x||_1                            n >= 1, non-smooth
///   max_quadratics    max_i (x^T A_i x / 2 + b_i^T x)    n >= 1, non-smooth
///   piecewise_linear  max_i (c_i^T x + d_i)              n >= 1, non-smooth
///
/// All have f* = 0. The non-smooth ones have their unique minimizer at the
/// origin, which is also their only Clarke-stationary point.
class ProblemRegistry {
 public:
  static const std::vector<std::string>& names();
  static bool contains(const std::string& name);
  /// Throws InputError naming the problem and listing the registry keys.
  static TestProblem make(const std::string& name, std::size_t dimension);
  static std::string describe(const std::string& name);
};

}  // namespace sdfo
