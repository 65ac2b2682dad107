#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "dgdlab/costs.hpp"
#include "dgdlab/numerics.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab {

struct ScCertificate {
  static constexpr double kTolerance = 1e-10;

  double alpha = 0.0;
  double min_hessian_eig = 0.0;
  bool is_strongly_convex = false;
  // |min eig| <= tolerance: neither certified nor clearly indefinite.
  bool boundary = false;
  double modulus = 0.0;  // min_hessian_eig when certified, else 0
};

enum class SearchMethod { grid, bisection };

std::string_view to_string(SearchMethod method);
SearchMethod parse_search_method(std::string_view text);

struct AlphaSearchOptions {
  SearchMethod method = SearchMethod::bisection;
  double resolution = 1e-6;  // bisection bracket width
  long grid_n = 10000;       // grid step is 1/grid_n
  double scan_cap = 1e3;
};

struct AlphaThreshold {
  double alpha_A = 0.0;  // +inf when every alpha up to scan_cap certifies
  SearchMethod method = SearchMethod::bisection;
  double resolution = 0.0;
  double scan_cap = 0.0;
  bool unbounded = false;
  double modulus = 0.0;  // certified modulus at alpha_A (at scan_cap when unbounded)

  /// Largest stepsize actually certified: alpha_A, or scan_cap for the
  /// unbounded sentinel.
  double certified_alpha() const noexcept { return unbounded ? scan_cap : alpha_A; }
};

struct MinimizerPoint {
  double alpha = 0.0;
  Vector x;
  double norm = 0.0;
};

struct MinimizerCurve {
  std::vector<MinimizerPoint> points;
  // |x*(a_{i+1}) - x*(a_i)| / |a_{i+1} - a_i|, one per adjacent pair.
  std::vector<double> lipschitz_ratios;
};

/// G_alpha(x) = alpha * F(x) + 1/2 x^T ((I - W) kron I_n) x on R^{nm}, with
/// F(x) = (1/m) sum_k f_k(x_k). Plain gradient descent x - grad G_alpha(x)
/// is one DGD step with per-agent stepsize alpha/m.
class LiftedObjective {
 public:
  LiftedObjective(QuadraticEnsemble ensemble, MixingMatrix mixing);

  const QuadraticEnsemble& ensemble() const noexcept { return ensemble_; }
  const MixingMatrix& mixing() const noexcept { return mixing_; }
  std::size_t agents() const noexcept { return ensemble_.agents(); }
  std::size_t local_dim() const noexcept { return ensemble_.dim(); }
  std::size_t dim() const noexcept { return agents() * local_dim(); }

  double value(std::span<const double> x, double alpha) const;
  Vector gradient(std::span<const double> x, double alpha) const;
  /// F(x) and its gradient (1/m) stack(grad f_k(x_k)).
  double F(std::span<const double> x) const;
  Vector grad_F(std::span<const double> x) const;

  SymMatrix hessian(double alpha) const;
  ScCertificate certify(double alpha) const;
  AlphaThreshold find_alpha_A(const AlphaSearchOptions& options = {}) const;
  Vector minimizer(double alpha) const;
  MinimizerCurve minimizer_curve(std::span<const double> alphas) const;

 private:
  QuadraticEnsemble ensemble_;
  MixingMatrix mixing_;
  SymMatrix consensus_;  // (I - W) kron I_n
};

/// Empirical C_1: max ||grad F|| over `samples` evenly spaced points of the
/// segment [a, b], endpoints included.
double estimate_c1(const LiftedObjective& obj, std::span<const double> a, std::span<const double> b,
                   int samples = 17);

/// 2 * alpha0 * c1 * |beta - alpha| / (mu * beta)
double minimizer_lipschitz_bound(double alpha0, double mu, double c1, double alpha, double beta);

}  // namespace dgdlab
