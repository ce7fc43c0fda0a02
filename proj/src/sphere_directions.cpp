#include "sdfo/sphere_directions.hpp"

#include <cmath>
#include <numbers>

#include "sdfo/errors.hpp"

namespace sdfo {

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::uint32_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

Vector halton_point(std::uint64_t index, std::span<const std::uint32_t> bases) {
  Vector u(bases.size());
  for (std::size_t d = 0; d < bases.size(); ++d) {
    const double inv_base = 1.0 / bases[d];
    double scale = inv_base;
    double value = 0.0;
    for (std::uint64_t i = index; i > 0; i /= bases[d]) {
      value += static_cast<double>(i % bases[d]) * scale;
      scale *= inv_base;
    }
    u[d] = value;
  }
  return u;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("inverse_normal_cdf: p must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step against erfc brings the 1.15e-9 approximation to ~1e-15.
  if (p != 0.5) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

DirectionGenerator::DirectionGenerator(std::size_t dimension, Scheme scheme)
    : dimension_(dimension), scheme_(std::move(scheme)) {
  if (dimension_ == 0) throw InputError("direction generator: dimension must be >= 1");
}

DirectionGenerator DirectionGenerator::quasi_random(std::size_t dimension) {
  DirectionGenerator gen(dimension, QuasiRandomSphere{});
  gen.bases_ = first_primes(dimension);
  return gen;
}

DirectionGenerator DirectionGenerator::uniform_random(std::size_t dimension, std::uint64_t seed) {
  DirectionGenerator gen(dimension, UniformRandomSphere{seed});
  gen.engine_.seed(seed);
  return gen;
}

DirectionGenerator DirectionGenerator::fixed_cycle(std::vector<Vector> directions) {
  if (directions.empty()) throw InputError("fixed_cycle: need at least one direction");
  const std::size_t n = directions.front().size();
  for (const auto& d : directions) {
    if (d.size() != n) throw InputError("fixed_cycle: directions differ in dimension");
    if (std::abs(norm2(d) - 1.0) > 1e-12) throw InputError("fixed_cycle: directions must be unit vectors");
  }
  return DirectionGenerator(n, FixedCycle{std::move(directions)});
}

std::string DirectionGenerator::scheme_name() const {
  if (std::holds_alternative<QuasiRandomSphere>(scheme_)) return "quasi_random";
  if (std::holds_alternative<UniformRandomSphere>(scheme_)) return "uniform_random";
  return "fixed_cycle";
}

Vector DirectionGenerator::next() {
  Vector g;
  if (const auto* cycle = std::get_if<FixedCycle>(&scheme_)) {
    g = cycle->directions[cursor_ % cycle->directions.size()];
  } else {
    const bool quasi = std::holds_alternative<QuasiRandomSphere>(scheme_);
    double len = 0.0;
    // Points that land (numerically) at the center of the Gaussian map carry
    // no direction; skip them.
    do {
      if (quasi) {
        g = halton_point(halton_index_++, bases_);
        for (double& v : g) v = inverse_normal_cdf(v);
      } else {
        g.resize(dimension_);
        for (double& v : g) v = normal_(engine_);
      }
      len = norm2(g);
    } while (len < 1e-8);
    for (double& v : g) v /= len;
  }
  ++cursor_;
  return g;
}

}  // namespace sdfo
