#pragma once

#include <cstdint>

#include "sdfo/linalg.hpp"

namespace sdfo {

/// m(s) = g^T s + s^T B s / 2 over ||s|| <= radius.
struct QuadraticModel {
  Vector g;  // unit norm
  Matrix B;  // symmetric
  double radius = 1.0;

  /// Throws InputError on size mismatch, non-finite entries, asymmetry above
  /// 1e-12, ||g|| off 1 by more than 1e-12, or radius <= 0.
  void validate() const;
  double value(std::span<const double> s) const;
};

struct SubproblemSolution {
  Vector s;
  double multiplier = 0.0;  // lambda
  bool on_boundary = false;
  bool hard_case = false;
  double model_decrease = 0.0;  // m(s)
};

/// Global minimizer of the model on the ball: s = -(B + lambda I)^+ g with
/// B + lambda I positive semidefinite and lambda (radius - ||s||) = 0.
/// Eigendecomposition plus a safeguarded Newton iteration on
/// 1/||s(lambda)|| - 1/radius, with the eigenvector correction when g has no
/// component along the lowest eigenspace.
SubproblemSolution solve_exact(const QuadraticModel& model);

struct ModelPoint {
  Vector point;
  double value = 0.0;
};

/// Best model value among the given feasible points (points outside the ball
/// are ignored). Throws InputError if none is feasible.
ModelPoint best_of(const QuadraticModel& model, const std::vector<Vector>& points);

/// Sampling oracle: n_samples points uniform in the ball, the 2n points
/// +-radius * (eigenvectors of B), and the minimum-norm stationary point of
/// the model projected onto the ball.
ModelPoint brute_force_min(const QuadraticModel& model, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace sdfo
