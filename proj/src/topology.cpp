#include "dgdlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "dgdlab/error.hpp"

namespace dgdlab {

Vector MixingMatrix::mix(std::span<const double> stacked, std::size_t n) const {
  const std::size_t m = agents();
  if (stacked.size() != m * n) throw Error(ErrorCode::dimension_mismatch, "state size is not m*n");
  Vector out(m * n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const double wkj = w_(k, j);
      if (wkj == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) out[k * n + i] += wkj * stacked[j * n + i];
    }
  }
  return out;
}

MixingMatrix validate(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size();
  if (m == 0) throw Error(ErrorCode::validation, "mixing matrix is empty");
  for (const auto& row : rows) {
    if (row.size() != m) throw Error(ErrorCode::dimension_mismatch, "mixing matrix is not square");
  }
  SymMatrix w = SymMatrix::from_rows(rows);  // throws asymmetric

  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (w(i, j) < 0.0) {
        throw Error(ErrorCode::not_stochastic, "mixing weights must be nonnegative");
      }
      row_sum += w(i, j);
    }
    if (std::abs(row_sum - 1.0) > MixingMatrix::kStochasticTolerance) {
      std::ostringstream os;
      os << "row " << i << " sums to " << row_sum << ", expected 1";
      throw Error(ErrorCode::not_stochastic, os.str());
    }
    if (!(w(i, i) > 0.0)) {
      throw Error(ErrorCode::zero_diagonal, "diagonal weight w_" + std::to_string(i) + std::to_string(i) +
                                                " must be positive");
    }
  }
  // Column sums equal row sums by symmetry.

  SpectralSummary s;
  if (m == 1) {
    s.lambda_min = w(0, 0);
    s.beta = 0.0;
    s.beta_abs = 0.0;
    s.spectral_gap = 1.0;
    s.single_agent = true;
  } else {
    const auto ev = sym_eigen(w).eigenvalues;
    s.lambda_min = ev.front();
    s.beta = ev[m - 2];
    s.beta_abs = std::max(std::abs(ev[m - 2]), std::abs(ev.front()));
    s.spectral_gap = 1.0 - s.beta;
    if (s.beta >= 1.0 - MixingMatrix::kConnectivityMargin) {
      std::ostringstream os;
      os << "communication graph is disconnected (second eigenvalue " << s.beta << ")";
      throw Error(ErrorCode::disconnected, os.str());
    }
  }
  return MixingMatrix(std::move(w), s);
}


MixingMatrix metropolis_weights(const std::vector<std::vector<int>>& adjacency) {
  const std::size_t m = adjacency.size();
  if (m == 0) throw Error(ErrorCode::validation, "adjacency matrix is empty");
  std::vector<std::size_t> degree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (adjacency[i].size() != m) throw Error(ErrorCode::dimension_mismatch, "adjacency is not square");
    for (std::size_t j = 0; j < m; ++j) {
      const int a = adjacency[i][j];
      if (a != 0 && a != 1) throw Error(ErrorCode::validation, "adjacency entries must be 0 or 1");
      if (a != adjacency[j][i]) throw Error(ErrorCode::asymmetric, "adjacency is not symmetric");
      if (i == j && a != 0) throw Error(ErrorCode::validation, "adjacency diagonal must be zero");
      degree[i] += static_cast<std::size_t>(a);
    }
  }

  std::vector<bool> seen(m, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < m; ++j) {
      if (adjacency[i][j] && !seen[j]) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  if (reached != m) throw Error(ErrorCode::disconnected, "adjacency graph is disconnected");

  std::vector<std::vector<double>> w(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && adjacency[i][j]) {
        w[i][j] = 1.0 / (1.0 + static_cast<double>(std::max(degree[i], degree[j])));
        off += w[i][j];
      }
    }
    w[i][i] = 1.0 - off;
  }
  return validate(w);
}

}  // namespace dgdlab
