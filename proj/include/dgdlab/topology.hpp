#pragma once

#include <cstddef>
#include <vector>

#include "dgdlab/numerics.hpp"

namespace dgdlab {

struct SpectralSummary {
  double lambda_min = 0.0;    // smallest eigenvalue of W
  double beta = 0.0;          // signed second-largest eigenvalue
  double beta_abs = 0.0;      // max(|lambda_2|, |lambda_min|), diagnostics only
  double spectral_gap = 1.0;  // 1 - beta
  bool single_agent = false;  // m == 1: beta is undefined and reported as 0
};

/// Symmetric doubly stochastic mixing matrix with positive diagonal over a
/// connected graph. Immutable once validated.
class MixingMatrix {
 public:
  static constexpr double kStochasticTolerance = 1e-10;
  static constexpr double kConnectivityMargin = 1e-12;

  std::size_t agents() const noexcept { return w_.dim(); }
  const SymMatrix& weights() const noexcept { return w_; }
  const SpectralSummary& spectral() const noexcept { return spectral_; }

  /// Applies (W kron I_n) to a stacked nm-vector.
  Vector mix(std::span<const double> stacked, std::size_t n) const;

  friend MixingMatrix validate(const std::vector<std::vector<double>>& rows);

 private:
  MixingMatrix(SymMatrix w, SpectralSummary s) : w_(std::move(w)), spectral_(s) {}

  SymMatrix w_;
  SpectralSummary spectral_;
};

/// Checks every mixing-matrix assumption. Failures carry distinct codes:
/// asymmetric, not_stochastic, zero_diagonal, disconnected.
MixingMatrix validate(const std::vector<std::vector<double>>& rows);

/// w_ij = 1/(1+max(deg_i,deg_j)) on edges, remainder on the diagonal.
MixingMatrix metropolis_weights(const std::vector<std::vector<int>>& adjacency);

inline const SpectralSummary& spectral_summary(const MixingMatrix& w) { return w.spectral(); }

}  // namespace dgdlab
