#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dgdlab/numerics.hpp"

namespace dgdlab {

/// f(x) = 1/2 x^T A x + b^T x. A may be indefinite.
struct QuadraticCost {
  SymMatrix a;
  Vector b;

  QuadraticCost(SymMatrix a_, Vector b_);

  std::size_t dim() const noexcept { return b.size(); }
  friend bool operator==(const QuadraticCost&, const QuadraticCost&) = default;
};

double eval(const QuadraticCost& c, std::span<const double> x);
Vector grad(const QuadraticCost& c, std::span<const double> x);

/// The m local costs and the spectral constants of f = (1/m) sum f_k.
class QuadraticEnsemble {
 public:
  explicit QuadraticEnsemble(std::vector<QuadraticCost> costs);

  std::size_t agents() const noexcept { return costs_.size(); }
  std::size_t dim() const noexcept { return costs_.front().dim(); }
  const std::vector<QuadraticCost>& costs() const noexcept { return costs_; }
  const QuadraticCost& cost(std::size_t k) const { return costs_.at(k); }

  /// (1/m) sum A_k
  const SymMatrix& aggregate_hessian() const noexcept { return aggregate_a_; }
  /// (1/m) sum b_k
  const Vector& aggregate_linear() const noexcept { return aggregate_b_; }

  double smoothness_L() const noexcept { return smoothness_; }
  double aggregate_mu() const noexcept { return mu_; }
  bool strongly_convex() const noexcept { return mu_ > 0.0; }

  /// Throws not_strongly_convex when aggregate_mu <= 0.
  const Vector& minimizer() const;
  double grad_bound_D() const;

  /// f(x) = (1/m) sum f_k(x)
  double aggregate_value(std::span<const double> x) const;
  Vector aggregate_grad(std::span<const double> x) const;

  friend bool operator==(const QuadraticEnsemble& a, const QuadraticEnsemble& b) {
    return a.costs_ == b.costs_;
  }

 private:
  std::vector<QuadraticCost> costs_;
  SymMatrix aggregate_a_;
  Vector aggregate_b_;
  double smoothness_ = 0.0;
  double mu_ = 0.0;
  std::optional<Vector> minimizer_;
  double grad_bound_ = 0.0;
};

/// Random ensemble A_k = eps*I + (R_k + R_k^T), entries of R_k and b_k
/// uniform on [-1,1].
///
/// The generator is std::mt19937_64 seeded with `seed`; each uniform draw
/// takes the top 53 bits of one 64-bit output, u = (x >> 11) * 2^-53, and
/// maps it to -1 + 2u. Draw order per agent k: R_k row-major, then b_k.
/// Both steps are fully specified, so ensembles are identical on every
/// platform.
QuadraticEnsemble random_ensemble(std::size_t m, std::size_t n, double epsilon, std::uint64_t seed);

/// Three agents in R^2: A_1 = A_2 = diag(L, mu), A_3 = diag(-eps, mu), b = 0.
QuadraticEnsemble epsilon_example(double big_l, double mu, double epsilon);

Vector aggregate_minimizer(const QuadraticEnsemble& e);
inline double smoothness_constant(const QuadraticEnsemble& e) { return e.smoothness_L(); }
inline double aggregate_mu(const QuadraticEnsemble& e) { return e.aggregate_mu(); }
inline double grad_bound_D(const QuadraticEnsemble& e) { return e.grad_bound_D(); }

}  // namespace dgdlab
