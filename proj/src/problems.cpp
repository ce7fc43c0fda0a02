#include "sdfo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

TestProblem base(const std::string& name, std::size_t n, Vector start) {
  TestProblem p;
  p.name = name;
  p.dimension = n;
  p.optimum_value = 0.0;
  p.default_start = std::move(start);
  return p;
}

TestProblem sphere(std::size_t n) {
  TestProblem p = base("sphere", n, Vector(n, 1.0));
  p.eval_true = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  p.stationary_points = {Vector(n, 0.0)};
  return p;
}

TestProblem rosenbrock(std::size_t n) {
  if (n < 2) throw InputError("rosenbrock: dimension must be >= 2");
  Vector start(n, 1.0);
  for (std::size_t i = 0; i < n; i += 2) start[i] = -1.2;
  TestProblem p = base("rosenbrock", n, start);
  p.eval_true = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  // For n >= 4 a second local minimizer exists near (-1, 1, ..., 1) and is
  // only known numerically.
  if (n <= 3) p.stationary_points = {Vector(n, 1.0)};
  return p;
}

TestProblem l1norm(std::size_t n) {
  TestProblem p = base("l1norm", n, Vector(n, 2.0));
  p.eval_true = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  };
  p.lipschitz_hint = std::sqrt(static_cast<double>(n));
  p.stationary_points = {Vector(n, 0.0)};
  return p;
}

// 2n pieces: b = +-e_j with diagonal curvature A = diag(1 + (j + k) mod 3).
// The b_i positively span R^n, so the origin is the unique minimizer.
TestProblem max_quadratics(std::size_t n) {
  TestProblem p = base("max_quadratics", n, Vector(n, 1.5));
  p.eval_true = [n](std::span<const double> x) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      for (int sign : {1, -1}) {
        const std::size_t shift = j + (sign > 0 ? 0 : 1);
        double q = 0.0;
        for (std::size_t k = 0; k < n; ++k) q += (1.0 + static_cast<double>((shift + k) % 3)) * x[k] * x[k];
        best = std::max(best, 0.5 * q + sign * x[j]);
      }
    }
    return best;
  };
  p.lipschitz_hint = 1.0;
  p.stationary_points = {Vector(n, 0.0)};
  return p;
}

// max(x_1, ..., x_n, -(x_1 + ... + x_n)).
TestProblem piecewise_linear(std::size_t n) {
  TestProblem p = base("piecewise_linear", n, Vector(n, 1.0));
  p.eval_true = [](std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    double best = -sum;
    for (double v : x) best = std::max(best, v);
    return best;
  };
  p.lipschitz_hint = std::sqrt(static_cast<double>(n));
  p.stationary_points = {Vector(n, 0.0)};
  return p;
}

std::string registry_keys() {
  std::string keys;
  for (const auto& k : ProblemRegistry::names()) keys += (keys.empty() ? "" : ", ") + k;
  return keys;
}

}  // namespace

const std::vector<std::string>& ProblemRegistry::names() {
  static const std::vector<std::string> kNames = {"sphere", "rosenbrock", "l1norm", "max_quadratics",
                                                  "piecewise_linear"};
  return kNames;
}

bool ProblemRegistry::contains(const std::string& name) {
  const auto& n = names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

TestProblem ProblemRegistry::make(const std::string& name, std::size_t dimension) {
  if (!contains(name)) throw InputError("unknown problem '" + name + "'; known problems: " + registry_keys());
  if (dimension == 0) throw InputError("problem '" + name + "': dimension must be >= 1");
  if (name == "sphere") return sphere(dimension);
  if (name == "rosenbrock") return rosenbrock(dimension);
  if (name == "l1norm") return l1norm(dimension);
  if (name == "max_quadratics") return max_quadratics(dimension);
  return piecewise_linear(dimension);
}

std::string ProblemRegistry::describe(const std::string& name) {
  if (name == "sphere") return "||x||^2; n >= 1; f* = 0 at 0";
  if (name == "rosenbrock") return "Rosenbrock valley; n >= 2; f* = 0 at (1,...,1)";
  if (name == "l1norm") return "||x||_1 (non-smooth); n >= 1; f* = 0 at 0";
  if (name == "max_quadratics") return "max of 2n convex quadratics (non-smooth); n >= 1; f* = 0 at 0";
  if (name == "piecewise_linear") return "max(x_1..x_n, -sum x) (non-smooth); n >= 1; f* = 0 at 0";
  throw InputError("unknown problem '" + name + "'; known problems: " + registry_keys());
}

}  // namespace sdfo
