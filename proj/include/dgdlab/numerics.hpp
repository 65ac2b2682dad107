#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dgdlab {

using Vector = std::vector<double>;

/// Dense real symmetric matrix stored row-major.
///
/// Construction through from_rows / from_row_major checks symmetry to
/// 1e-12 absolute and mirrors the upper triangle, so the stored entries are
/// exactly symmetric afterwards.
class SymMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static SymMatrix from_row_major(std::size_t dim, std::span<const double> entries);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  /// Writes (i,j) and (j,i) together.
  void set(std::size_t i, std::size_t j, double value);
  void add(std::size_t i, std::size_t j, double value);

  std::span<const double> entries() const noexcept { return data_; }
  std::vector<std::vector<double>> rows() const;

  double trace() const;
  double frobenius_norm() const;
  Vector multiply(std::span<const double> x) const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

struct Spectrum {
  Vector eigenvalues;  // ascending
  // Column-major orthonormal eigenvectors: column k occupies
  // [k*dim, (k+1)*dim). Present only when requested.
  std::optional<std::vector<double>> eigenvectors;

  std::span<const double> eigenvector(std::size_t k) const;
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;  // off-diagonal Frobenius vs ||A||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigendecomposition.
Spectrum sym_eigen(const SymMatrix& a, bool want_vectors = false,
                   const JacobiOptions& options = {});

double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);
/// max |lambda|
double spectral_norm(const SymMatrix& a);

/// Cholesky solve. Throws ErrorCode::singular when a pivot falls at or below
/// 1e-12 (scaled by the largest diagonal entry).
Vector solve_spd(const SymMatrix& a, std::span<const double> rhs);

// Small vector helpers shared by the modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y

}  // namespace dgdlab
