#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "sdfo/linalg.hpp"

namespace sdfo {

/// First `count` primes.
std::vector<std::uint32_t> first_primes(std::size_t count);

/// Radical inverse of `index` in base b, one coordinate per base.
Vector halton_point(std::uint64_t index, std::span<const std::uint32_t> bases);

/// Inverse standard normal CDF (Acklam's rational approximation with one
/// Halley refinement step). p must lie in (0, 1).
double inverse_normal_cdf(double p);

/// Deterministic stream of unit vectors g_0, g_1, ... on S^{n-1}.
///
/// The stream never looks at function values, so each g_k is fixed before
/// the estimates of iteration k are drawn.
class DirectionGenerator {
 public:
  /// Halton points pushed through the inverse normal CDF and normalized.
  struct QuasiRandomSphere {};
  struct UniformRandomSphere {
    std::uint64_t seed = 0;
  };
  struct FixedCycle {
    std::vector<Vector> directions;
  };
  using Scheme = std::variant<QuasiRandomSphere, UniformRandomSphere, FixedCycle>;

  static DirectionGenerator quasi_random(std::size_t dimension);
  static DirectionGenerator uniform_random(std::size_t dimension, std::uint64_t seed);
  /// Every vector must have unit norm within 1e-12.
  static DirectionGenerator fixed_cycle(std::vector<Vector> directions);

  std::size_t dimension() const { return dimension_; }
  std::uint64_t cursor() const { return cursor_; }
  const Scheme& scheme() const { return scheme_; }
  std::string scheme_name() const;

  Vector next();

 private:
  DirectionGenerator(std::size_t dimension, Scheme scheme);

  std::size_t dimension_;
  Scheme scheme_;
  std::uint64_t cursor_ = 0;
  std::uint64_t halton_index_ = 1;  // index 0 is the origin of the cube
  std::vector<std::uint32_t> bases_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sdfo
