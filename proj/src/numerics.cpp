#include "dgdlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dgdlab/error.hpp"

namespace dgdlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::singular: return "singular";
    case ErrorCode::asymmetric: return "asymmetric";
    case ErrorCode::not_stochastic: return "not_stochastic";
    case ErrorCode::zero_diagonal: return "zero_diagonal";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::not_strongly_convex: return "not_strongly_convex";
    case ErrorCode::not_in_class: return "not_in_class";
    case ErrorCode::radius_undefined: return "radius_undefined";
    case ErrorCode::invalid_schedule: return "invalid_schedule";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw Error(ErrorCode::validation, "matrix dimension must be >= 1");
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::from_row_major(std::size_t dim, std::span<const double> entries) {
  if (entries.size() != dim * dim) {
    throw Error(ErrorCode::dimension_mismatch, "expected " + std::to_string(dim * dim) +
                                                   " entries, got " + std::to_string(entries.size()));
  }
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      const double upper = entries[i * dim + j];
      const double lower = entries[j * dim + i];
      if (!std::isfinite(upper) || !std::isfinite(lower)) {
        throw Error(ErrorCode::validation, "matrix entries must be finite");
      }
      if (std::abs(upper - lower) > kSymmetryTolerance) {
        std::ostringstream os;
        os << "matrix is not symmetric at (" << i << "," << j << "): " << upper << " vs " << lower;
        throw Error(ErrorCode::asymmetric, os.str());
      }
      m.data_[i * dim + j] = upper;
      m.data_[j * dim + i] = upper;
    }
  }
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t dim = rows.size();
  if (dim == 0) throw Error(ErrorCode::validation, "matrix must have at least one row");
  std::vector<double> flat;
  flat.reserve(dim * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw Error(ErrorCode::dimension_mismatch, "matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_row_major(dim, flat);
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] = value;
  data_[j * dim_ + i] = value;
}

void SymMatrix::add(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] += value;
  if (i != j) data_[j * dim_ + i] += value;
}

std::vector<std::vector<double>> SymMatrix::rows() const {
  std::vector<std::vector<double>> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i].assign(data_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
  }
  return out;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
  return t;
}

double SymMatrix::frobenius_norm() const { return norm(data_); }

Vector SymMatrix::multiply(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::dimension_mismatch, "matrix-vector size mismatch");
  Vector y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = data_.data() + i * dim_;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.dim_ != dim_) throw Error(ErrorCode::dimension_mismatch, "matrix sum size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix out = b;
  out *= -1.0;
  out += a;
  return out;
}

SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

std::span<const double> Spectrum::eigenvector(std::size_t k) const {
  if (!eigenvectors) throw Error(ErrorCode::validation, "eigenvectors were not requested");
  const std::size_t dim = eigenvalues.size();
  return std::span<const double>(*eigenvectors).subspan(k * dim, dim);
}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s += a[i * n + j] * a[i * n + j];
    }
  }
  return std::sqrt(s);
}

}  // namespace

Spectrum sym_eigen(const SymMatrix& a, bool want_vectors, const JacobiOptions& options) {
  const std::size_t n = a.dim();
  std::vector<double> work(a.entries().begin(), a.entries().end());
  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  const double target = options.relative_tolerance * a.frobenius_norm();
  int sweep = 0;
  while (off_diagonal_norm(work, n) > target) {
    if (sweep++ >= options.max_sweeps) {
      throw Error(ErrorCode::numerical, "Jacobi eigensolver did not converge in " +
                                            std::to_string(options.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = work[p * n + q];
        if (apq == 0.0) continue;
        const double app = work[p * n + p];
        const double aqq = work[q * n + q];
        // Rotation angle annihilating (p,q); t is the smaller root of
        // t^2 + 2*theta*t - 1 = 0.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = work[k * n + p];
          const double akq = work[k * n + q];
          work[k * n + p] = c * akp - s * akq;
          work[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = work[p * n + k];
          const double aqk = work[q * n + k];
          work[p * n + k] = c * apk - s * aqk;
          work[q * n + k] = s * apk + c * aqk;
        }
        work[p * n + q] = 0.0;
        work[q * n + p] = 0.0;

        if (want_vectors) {
          // v is row-major here; columns are eigenvectors.
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k * n + p];
            const double vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return work[i * n + i] < work[j * n + j]; });

  Spectrum out;
  out.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.eigenvalues[k] = work[order[k] * n + order[k]];
  if (want_vectors) {
    std::vector<double> cols(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) cols[k * n + i] = v[i * n + order[k]];
    }
    out.eigenvectors = std::move(cols);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& a) { return sym_eigen(a).eigenvalues.front(); }

double max_eigenvalue(const SymMatrix& a) { return sym_eigen(a).eigenvalues.back(); }

double spectral_norm(const SymMatrix& a) {
  const auto ev = sym_eigen(a).eigenvalues;
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

Vector solve_spd(const SymMatrix& a, std::span<const double> rhs) {
  const std::size_t n = a.dim();
  if (rhs.size() != n) throw Error(ErrorCode::dimension_mismatch, "rhs size does not match matrix");

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double pivot_tol = 1e-12 * std::max(1.0, max_diag);

  // Lower-triangular factor, row-major.
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > pivot_tol)) {
      std::ostringstream os;
      os << "matrix is not positive definite (pivot " << d << " at row " << j << ")";
      throw Error(ErrorCode::singular, os.str());
    }
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }

  const auto substitute = [&](Vector y) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) y[i] -= l[i * n + k] * y[k];
      y[i] /= l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) y[i] -= l[k * n + i] * y[k];
      y[i] /= l[i * n + i];
    }
    return y;
  };

  Vector x = substitute(Vector(rhs.begin(), rhs.end()));
  // Refinement with an extended-precision residual keeps near-singular
  // systems accurate.
  for (int pass = 0; pass < 3; ++pass) {
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double s = rhs[i];
      for (std::size_t j = 0; j < n; ++j) s -= static_cast<long double>(a(i, j)) * x[j];
      r[i] = static_cast<double>(s);
    }
    const Vector dx = substitute(std::move(r));
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  }
  return x;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "dot product size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "distance size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::dimension_mismatch, "axpy size mismatch");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

}  // namespace dgdlab
