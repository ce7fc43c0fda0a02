#include "sdfo/tr_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sdfo/errors.hpp"

namespace sdfo {

namespace {

constexpr double kHardCaseThreshold = 1e-12;
constexpr double kBoundaryTol = 1e-10;
constexpr int kMaxNewton = 100;
constexpr int kMaxBisection = 200;

bool is_zero(const Matrix& b) {
  const auto d = b.data();
  return std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
}

Vector combine(const Matrix& q, const Vector& coeff) {
  Vector s(q.rows(), 0.0);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    if (coeff[j] == 0.0) continue;
    for (std::size_t i = 0; i < q.rows(); ++i) s[i] += coeff[j] * q(i, j);
  }
  return s;
}

}  // namespace

void QuadraticModel::validate() const {
  const std::size_t n = g.size();
  if (n == 0) throw InputError("quadratic model: empty gradient direction");
  if (B.rows() != n || B.cols() != n) throw InputError("quadratic model: B must be n x n with n = len(g)");
  if (!all_finite(g) || !all_finite(B.data())) throw InputError("quadratic model: non-finite entries");
  if (asymmetry(B) > 1e-12) throw InputError("quadratic model: B is not symmetric");
  if (std::abs(norm2(g) - 1.0) > 1e-12) throw InputError("quadratic model: g must have unit norm");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("quadratic model: radius must be > 0");
}

double QuadraticModel::value(std::span<const double> s) const { return dot(g, s) + 0.5 * quadratic_form(B, s); }

SubproblemSolution solve_exact(const QuadraticModel& model) {
  model.validate();
  const double delta = model.radius;
  SubproblemSolution sol;

  // Linear model: the minimizer is exactly -delta g.
  if (is_zero(model.B)) {
    sol.s = scaled(-delta, model.g);
    sol.multiplier = norm2(model.g) / delta;
    sol.on_boundary = true;
    sol.model_decrease = model.value(sol.s);
    return sol;
  }

  const std::size_t n = model.g.size();
  const SymmetricEigen eig = symmetric_eigen(model.B);
  const double lam1 = eig.values.front();
  double scale = 1.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));

  Vector gamma(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += eig.vectors(r, i) * model.g[r];
    gamma[i] = s;
  }
  // Shifted eigenvalues d_i = lambda_i - lambda_1 >= 0. Working in
  // mu = lambda + lambda_1 keeps the near-singular denominators exact.
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = eig.values[i] - lam1;
  d[0] = 0.0;

  double gamma_norm = norm2(gamma);
  double proj1_sq = 0.0;
  std::size_t lowest_dim = 0;
  for (std::size_t i = 0; i < n && d[i] <= 1e-12 * scale; ++i) {
    proj1_sq += gamma[i] * gamma[i];
    ++lowest_dim;
  }
  const double proj1 = std::sqrt(proj1_sq);

  auto finish = [&](Vector coeff, double lambda, bool boundary) {
    sol.s = combine(eig.vectors, coeff);
    sol.multiplier = std::max(0.0, lambda);
    sol.on_boundary = boundary;
    sol.model_decrease = model.value(sol.s);
    return sol;
  };

  Vector coeff(n);
  if (lam1 > 0.0) {
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      coeff[i] = -gamma[i] / eig.values[i];
      nn += coeff[i] * coeff[i];
    }
    if (std::sqrt(nn) <= delta) return finish(coeff, 0.0, false);
  }

  const double mu_floor = std::max(lam1, 0.0);
  if (lam1 <= 0.0 && proj1 <= kHardCaseThreshold) {
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      coeff[i] = i < lowest_dim ? 0.0 : -gamma[i] / d[i];
      nn += coeff[i] * coeff[i];
    }
    if (std::sqrt(nn) <= delta) {
      const double t = std::sqrt(std::max(0.0, delta * delta - nn));
      coeff[0] = gamma[0] > 0.0 ? -t : t;
      sol.hard_case = true;
      return finish(coeff, -lam1, true);
    }
  }

  // psi(mu) = ||s||, s3(mu) = sum gamma_i^2 / (d_i + mu)^3.
  auto evaluate = [&](double mu, double& s3) {
    double s2 = 0.0;
    s3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (gamma[i] == 0.0) continue;
      const double den = d[i] + mu;
      const double t = gamma[i] / den;
      s2 += t * t;
      s3 += t * t / den;
    }
    return std::sqrt(s2);
  };

  double lo = std::max({mu_floor, gamma_norm / delta - d.back(), proj1 / delta});
  double hi = std::max(gamma_norm / delta, lo);
  double mu = lo > mu_floor ? lo : 0.5 * (lo + hi);
  const double tol = kBoundaryTol * delta;
  for (int it = 0; it < kMaxNewton + kMaxBisection; ++it) {
    double s3 = 0.0;
    const double psi = evaluate(mu, s3);
    if (std::abs(psi - delta) <= tol) break;
    if (psi > delta)
      lo = mu;
    else
      hi = mu;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = 0.5 * (lo + hi);
    if (it < kMaxNewton && s3 > 0.0) {
      const double newton = mu + (psi - delta) * psi * psi / (delta * s3);
      if (newton > lo && newton < hi) next = newton;
    }
    mu = next;
  }
  for (std::size_t i = 0; i < n; ++i) coeff[i] = gamma[i] == 0.0 ? 0.0 : -gamma[i] / (d[i] + mu);
  return finish(coeff, mu - lam1, true);
}

ModelPoint best_of(const QuadraticModel& model, const std::vector<Vector>& points) {
  model.validate();
  ModelPoint best{{}, std::numeric_limits<double>::infinity()};
  for (const auto& p : points) {
    if (p.size() != model.g.size()) throw InputError("best_of: point has the wrong dimension");
    if (norm2(p) > model.radius * (1.0 + 1e-10)) continue;
    const double v = model.value(p);
    if (v < best.value) best = {p, v};
  }
  if (best.point.empty()) throw InputError("best_of: no feasible point");
  return best;
}

ModelPoint brute_force_min(const QuadraticModel& model, std::uint64_t n_samples, std::uint64_t seed) {
  model.validate();
  if (n_samples == 0) throw InputError("brute_force_min: need at least one sample");
  const std::size_t n = model.g.size();
  const double delta = model.radius;

  std::vector<Vector> structured;
  const SymmetricEigen eig = symmetric_eigen(model.B);
  double scale = 1.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  Vector newton(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Vector q = eig.vectors.column(j);
    structured.push_back(scaled(delta, q));
    structured.push_back(scaled(-delta, q));
    if (std::abs(eig.values[j]) > 1e-12 * scale) newton = axpy(-dot(q, model.g) / eig.values[j], q, newton);
  }
  const double nn = norm2(newton);
  if (nn > delta) newton = scaled(delta / nn, newton);
  structured.push_back(std::move(newton));
  ModelPoint best = best_of(model, structured);

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector s(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::uint64_t k = 0; k < n_samples; ++k) {
    double len = 0.0;
    do {
      len = 0.0;
      for (double& v : s) {
        v = normal(engine);
        len += v * v;
      }
      len = std::sqrt(len);
    } while (len == 0.0);
    const double r = delta * std::pow(uniform(engine), inv_n) / len;
    for (double& v : s) v *= r;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += model.B(i, j) * s[j];
      value += s[i] * (model.g[i] + 0.5 * row);
    }
    if (value < best.value) best = {s, value};
  }
  return best;
}

}  // namespace sdfo
