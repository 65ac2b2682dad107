#include "dgdlab/costs.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dgdlab/error.hpp"

namespace dgdlab {

QuadraticCost::QuadraticCost(SymMatrix a_, Vector b_) : a(std::move(a_)), b(std::move(b_)) {
  if (a.dim() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "cost curvature is " + std::to_string(a.dim()) +
                                                   "-dimensional but linear term has " +
                                                   std::to_string(b.size()) + " entries");
  }
}

double eval(const QuadraticCost& c, std::span<const double> x) {
  if (x.size() != c.dim()) throw Error(ErrorCode::dimension_mismatch, "cost evaluated at wrong dimension");
  const Vector ax = c.a.multiply(x);
  return 0.5 * dot(x, ax) + dot(c.b, x);
}

Vector grad(const QuadraticCost& c, std::span<const double> x) {
  if (x.size() != c.dim()) throw Error(ErrorCode::dimension_mismatch, "gradient evaluated at wrong dimension");
  Vector g = c.a.multiply(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += c.b[i];
  return g;
}

QuadraticEnsemble::QuadraticEnsemble(std::vector<QuadraticCost> costs) : costs_(std::move(costs)) {
  if (costs_.empty()) throw Error(ErrorCode::validation, "ensemble needs at least one cost");
  const std::size_t n = costs_.front().dim();
  for (const auto& c : costs_) {
    if (c.dim() != n) throw Error(ErrorCode::dimension_mismatch, "local costs differ in dimension");
  }

  const double inv_m = 1.0 / static_cast<double>(costs_.size());
  aggregate_a_ = SymMatrix(n);
  aggregate_b_.assign(n, 0.0);
  for (const auto& c : costs_) {
    aggregate_a_ += c.a;
    for (std::size_t i = 0; i < n; ++i) aggregate_b_[i] += c.b[i];
    smoothness_ = std::max(smoothness_, spectral_norm(c.a));
  }
  aggregate_a_ *= inv_m;
  for (double& v : aggregate_b_) v *= inv_m;
  mu_ = min_eigenvalue(aggregate_a_);

  if (mu_ > 0.0) {
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -aggregate_b_[i];
    minimizer_ = solve_spd(aggregate_a_, rhs);
    for (const auto& c : costs_) grad_bound_ = std::max(grad_bound_, norm(grad(c, *minimizer_)));
  }
}

const Vector& QuadraticEnsemble::minimizer() const {
  if (!minimizer_) {
    throw Error(ErrorCode::not_strongly_convex,
                "aggregate cost is not strongly convex (mu = " + std::to_string(mu_) + ")");
  }
  return *minimizer_;
}

double QuadraticEnsemble::grad_bound_D() const {
  minimizer();
  return grad_bound_;
}

double QuadraticEnsemble::aggregate_value(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& c : costs_) s += eval(c, x);
  return s / static_cast<double>(costs_.size());
}

Vector QuadraticEnsemble::aggregate_grad(std::span<const double> x) const {
  Vector g = aggregate_a_.multiply(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += aggregate_b_[i];
  return g;
}

namespace {

double uniform_pm1(std::mt19937_64& gen) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return -1.0 + 2.0 * u;
}

}  // namespace

QuadraticEnsemble random_ensemble(std::size_t m, std::size_t n, double epsilon, std::uint64_t seed) {
  if (m == 0 || n == 0) throw Error(ErrorCode::validation, "m and n must be >= 1");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::validation, "epsilon must be >= 0");
  std::mt19937_64 gen(seed);
  std::vector<QuadraticCost> costs;
  costs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> r(n * n);
    for (double& v : r) v = uniform_pm1(gen);
    SymMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) a.set(i, j, r[i * n + j] + r[j * n + i]);
      a.add(i, i, epsilon);
    }
    Vector b(n);
    for (double& v : b) v = uniform_pm1(gen);
    costs.emplace_back(std::move(a), std::move(b));
  }
  return QuadraticEnsemble(std::move(costs));
}

QuadraticEnsemble epsilon_example(double big_l, double mu, double epsilon) {
  if (!(big_l > mu && mu > 0.0)) throw Error(ErrorCode::validation, "epsilon example needs L > mu > 0");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::validation, "epsilon must be >= 0");
  const double convex[] = {big_l, mu};
  const double bent[] = {-epsilon, mu};
  std::vector<QuadraticCost> costs;
  costs.emplace_back(SymMatrix::diagonal(convex), Vector(2, 0.0));
  costs.emplace_back(SymMatrix::diagonal(convex), Vector(2, 0.0));
  costs.emplace_back(SymMatrix::diagonal(bent), Vector(2, 0.0));
  return QuadraticEnsemble(std::move(costs));
}

Vector aggregate_minimizer(const QuadraticEnsemble& e) { return e.minimizer(); }

}  // namespace dgdlab
