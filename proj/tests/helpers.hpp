#pragma once

// Fixtures and independent oracles shared by the test binaries. Nothing here
// calls the eigensolver or the Cholesky solver under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dgdlab/costs.hpp"
#include "dgdlab/numerics.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab::testing {

// W used in the numerical experiments: 1/2 on the diagonal, 1/4 elsewhere.
inline std::vector<std::vector<double>> experiment_w() {
  return {{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}};
}

// W used with the epsilon example.
inline std::vector<std::vector<double>> example_w() {
  return {{0.4, 0.3, 0.3}, {0.3, 0.3, 0.4}, {0.3, 0.4, 0.3}};
}

inline Vector random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (double& x : v) x = u(gen);
  return v;
}

inline SymMatrix random_symmetric(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) a.set(i, j, u(gen));
  }
  return a;
}

/// Random orthogonal matrix (row-major) by modified Gram-Schmidt.
inline std::vector<double> random_orthogonal(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> q(n * n);
  for (double& x : q) x = g(gen);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += q[r * n + c] * q[r * n + p];
      for (std::size_t r = 0; r < n; ++r) q[r * n + c] -= d * q[r * n + p];
    }
    double nn = 0.0;
    for (std::size_t r = 0; r < n; ++r) nn += q[r * n + c] * q[r * n + c];
    nn = std::sqrt(nn);
    for (std::size_t r = 0; r < n; ++r) q[r * n + c] /= nn;
  }
  return q;
}

/// Q^T A Q with Q row-major.
inline SymMatrix rotate(const SymMatrix& a, const std::vector<double>& q) {
  const std::size_t n = a.dim();
  std::vector<double> aq(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) aq[i * n + j] += a(i, k) * q[k * n + j];
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i * n + j] += q[k * n + i] * aq[k * n + j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out[j * n + i] = out[i * n + j];
  return SymMatrix::from_row_major(n, out);
}

/// Q diag(d) Q^T, an SPD matrix with known spectrum when d > 0.
inline SymMatrix with_spectrum(const std::vector<double>& q, const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i * n + j] += q[i * n + k] * d[k] * q[j * n + k];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out[j * n + i] = out[i * n + j];
  return SymMatrix::from_row_major(n, out);
}

/// Spectral norm by power iteration on A^2.
inline double power_iteration_norm(const SymMatrix& a, int iterations = 5000) {
  const std::size_t n = a.dim();
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = a.multiply(a.multiply(v));
    double nn = 0.0;
    for (double x : w) nn += x * x;
    nn = std::sqrt(nn);
    if (nn == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nn;
    lambda = nn;
  }
  return std::sqrt(lambda);
}

inline Vector central_difference(const QuadraticCost& c, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (eval(c, xp) - eval(c, xm)) / (2.0 * h);
  }
  return g;
}

/// Recipe-style random ensembles filtered for a positive definite aggregate.
struct InstanceFilter {
  bool require_indefinite_local = false;
  bool require_all_local_psd = false;
};

inline bool local_indefinite(const QuadraticEnsemble& e) {
  for (const auto& c : e.costs()) {
    if (min_eigenvalue(c.a) < 0.0) return true;
  }
  return false;
}

inline std::vector<QuadraticEnsemble> seeded_instances(std::size_t count, std::size_t m, std::size_t n,
                                                       double epsilon, InstanceFilter filter,
                                                       std::uint64_t first_seed = 1) {
  std::vector<QuadraticEnsemble> out;
  for (std::uint64_t seed = first_seed; out.size() < count && seed < first_seed + 100000; ++seed) {
    QuadraticEnsemble e = random_ensemble(m, n, epsilon, seed);
    if (e.aggregate_mu() < 1e-3) continue;
    if (filter.require_indefinite_local && !local_indefinite(e)) continue;
    if (filter.require_all_local_psd && local_indefinite(e)) continue;
    out.push_back(std::move(e));
  }
  return out;
}

/// Number of eigenvalues of A below sigma, by Sylvester's law of inertia on
/// an unpivoted LDL^T of A - sigma I. Row-major dense input.
inline std::size_t count_below(const std::vector<double>& a, std::size_t n, double sigma) {
  std::vector<double> m(a);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= sigma;
  std::size_t negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double d = m[k * n + k];
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m[i * n + k] / d;
      for (std::size_t j = k + 1; j < n; ++j) m[i * n + j] -= l * m[k * n + j];
    }
  }
  return negative;
}

/// Smallest eigenvalue by bisection on the inertia count inside the
/// Gershgorin interval.
inline double min_eig_oracle(const std::vector<double>& a, std::size_t n, double tol = 1e-13) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(a[i * n + j]);
    lo = std::min(lo, a[i * n + i] - r);
    hi = std::max(hi, a[i * n + i] + r);
  }
  lo -= 1.0;
  hi += 1.0;
  while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, n, mid) >= 1) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline double min_eig_oracle(const SymMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = a(i, j);
  return min_eig_oracle(d, n);
}

/// (s/m) blockdiag(A_k) + (I - W) kron I_n assembled entry by entry.
inline std::vector<double> lifted_hessian_oracle(const QuadraticEnsemble& e,
                                                 const std::vector<std::vector<double>>& w, double alpha) {
  const std::size_t m = e.agents(), n = e.dim(), d = m * n;
  std::vector<double> h(d * d, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < n; ++i) h[(k * n + i) * d + j * n + i] = (k == j ? 1.0 : 0.0) - w[k][j];
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        h[(k * n + i) * d + k * n + j] += alpha / static_cast<double>(m) * e.cost(k).a(i, j);
  return h;
}

inline double lifted_min_eig_oracle(const QuadraticEnsemble& e, const std::vector<std::vector<double>>& w,
                                    double alpha) {
  return min_eig_oracle(lifted_hessian_oracle(e, w, alpha), e.agents() * e.dim());
}

inline QuadraticEnsemble make_ensemble(std::vector<SymMatrix> as, std::vector<Vector> bs) {
  std::vector<QuadraticCost> costs;
  for (std::size_t k = 0; k < as.size(); ++k) costs.emplace_back(std::move(as[k]), std::move(bs[k]));
  return QuadraticEnsemble(std::move(costs));
}

}  // namespace dgdlab::testing
