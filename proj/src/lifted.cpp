#include "dgdlab/lifted.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgdlab/error.hpp"

namespace dgdlab {

std::string_view to_string(SearchMethod method) {
  return method == SearchMethod::grid ? "grid" : "bisection";
}

SearchMethod parse_search_method(std::string_view text) {
  if (text == "grid") return SearchMethod::grid;
  if (text == "bisection") return SearchMethod::bisection;
  throw Error(ErrorCode::config, "unknown alpha search method '" + std::string(text) + "'");
}

namespace {

void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "stepsize must be positive and finite, got " << alpha;
    throw Error(ErrorCode::validation, os.str());
  }
}

}  // namespace

LiftedObjective::LiftedObjective(QuadraticEnsemble ensemble, MixingMatrix mixing)
    : ensemble_(std::move(ensemble)), mixing_(std::move(mixing)) {
  if (ensemble_.agents() != mixing_.agents()) {
    throw Error(ErrorCode::dimension_mismatch,
                "ensemble has " + std::to_string(ensemble_.agents()) + " agents but W is " +
                    std::to_string(mixing_.agents()) + "x" + std::to_string(mixing_.agents()));
  }
  const std::size_t m = agents();
  const std::size_t n = local_dim();
  consensus_ = SymMatrix(m * n);
  const SymMatrix& w = mixing_.weights();
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = k; j < m; ++j) {
      const double v = (k == j ? 1.0 : 0.0) - w(k, j);
      for (std::size_t i = 0; i < n; ++i) consensus_.set(k * n + i, j * n + i, v);
    }
  }
}

double LiftedObjective::F(std::span<const double> x) const {
  if (x.size() != dim()) throw Error(ErrorCode::dimension_mismatch, "lifted state has wrong size");
  const std::size_t n = local_dim();
  double s = 0.0;
  for (std::size_t k = 0; k < agents(); ++k) s += eval(ensemble_.cost(k), x.subspan(k * n, n));
  return s / static_cast<double>(agents());
}

Vector LiftedObjective::grad_F(std::span<const double> x) const {
  if (x.size() != dim()) throw Error(ErrorCode::dimension_mismatch, "lifted state has wrong size");
  const std::size_t n = local_dim();
  const double inv_m = 1.0 / static_cast<double>(agents());
  Vector g(dim());
  for (std::size_t k = 0; k < agents(); ++k) {
    const Vector gk = grad(ensemble_.cost(k), x.subspan(k * n, n));
    for (std::size_t i = 0; i < n; ++i) g[k * n + i] = inv_m * gk[i];
  }
  return g;
}

double LiftedObjective::value(std::span<const double> x, double alpha) const {
  const Vector lx = consensus_.multiply(x);
  return alpha * F(x) + 0.5 * dot(x, lx);
}

Vector LiftedObjective::gradient(std::span<const double> x, double alpha) const {
  Vector g = consensus_.multiply(x);
  const Vector gf = grad_F(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += alpha * gf[i];
  return g;
}

SymMatrix LiftedObjective::hessian(double alpha) const {
  require_positive_alpha(alpha);
  const std::size_t n = local_dim();
  const double scale = alpha / static_cast<double>(agents());
  SymMatrix h = consensus_;
  for (std::size_t k = 0; k < agents(); ++k) {
    const SymMatrix& a = ensemble_.cost(k).a;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) h.add(k * n + i, k * n + j, scale * a(i, j));
    }
  }
  return h;
}

ScCertificate LiftedObjective::certify(double alpha) const {
  ScCertificate c;
  c.alpha = alpha;
  c.min_hessian_eig = min_eigenvalue(hessian(alpha));
  c.is_strongly_convex = c.min_hessian_eig > ScCertificate::kTolerance;
  c.boundary = std::abs(c.min_hessian_eig) <= ScCertificate::kTolerance;
  c.modulus = c.is_strongly_convex ? c.min_hessian_eig : 0.0;
  return c;
}

// The minimum Hessian eigenvalue is concave in alpha and vanishes at
// alpha = 0, so the certified stepsizes form an interval (0, alpha_A].
AlphaThreshold LiftedObjective::find_alpha_A(const AlphaSearchOptions& options) const {
  if (!(options.scan_cap > 0.0)) throw Error(ErrorCode::validation, "scan cap must be positive");
  AlphaThreshold out;
  out.method = options.method;
  out.scan_cap = options.scan_cap;

  const ScCertificate at_cap = certify(options.scan_cap);
  if (at_cap.is_strongly_convex) {
    out.alpha_A = std::numeric_limits<double>::infinity();
    out.unbounded = true;
    out.modulus = at_cap.modulus;
    out.resolution = options.method == SearchMethod::grid ? 1.0 / static_cast<double>(options.grid_n)
                                                          : options.resolution;
    return out;
  }

  if (options.method == SearchMethod::grid) {
    if (options.grid_n < 1) throw Error(ErrorCode::validation, "grid N must be >= 1");
    const double step = 1.0 / static_cast<double>(options.grid_n);
    out.resolution = step;
    double last = 0.0;
    double last_modulus = 0.0;
    for (long k = 1;; ++k) {
      const double alpha = static_cast<double>(k) * step;
      if (alpha >= options.scan_cap) break;
      const ScCertificate c = certify(alpha);
      if (!c.is_strongly_convex) break;
      last = alpha;
      last_modulus = c.modulus;
    }
    if (last == 0.0) {
      throw Error(ErrorCode::not_in_class, "no grid stepsize k/N certifies strong convexity of G_alpha");
    }
    out.alpha_A = last;
    out.modulus = last_modulus;
    return out;
  }

  if (!(options.resolution > 0.0)) throw Error(ErrorCode::validation, "resolution must be positive");
  out.resolution = options.resolution;
  double hi = options.scan_cap;
  double lo = 0.0;
  double lo_modulus = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double alpha = hi * 0.5;
    const ScCertificate c = certify(alpha);
    if (c.is_strongly_convex) {
      lo = alpha;
      lo_modulus = c.modulus;
      break;
    }
    hi = alpha;
    if (hi < 1e-300) break;
  }
  if (lo == 0.0) {
    throw Error(ErrorCode::not_in_class, "G_alpha is not strongly convex for any stepsize below the scan cap");
  }
  while (hi - lo > options.resolution) {
    const double mid = 0.5 * (lo + hi);
    const ScCertificate c = certify(mid);
    if (c.is_strongly_convex) {
      lo = mid;
      lo_modulus = c.modulus;
    } else {
      hi = mid;
    }
  }
  out.alpha_A = lo;
  out.modulus = lo_modulus;
  return out;
}

Vector LiftedObjective::minimizer(double alpha) const {
  const ScCertificate c = certify(alpha);
  if (!c.is_strongly_convex) {
    std::ostringstream os;
    os << "G_alpha is not strongly convex at alpha = " << alpha << " (min Hessian eigenvalue "
       << c.min_hessian_eig << ")";
    throw Error(ErrorCode::not_strongly_convex, os.str());
  }
  const std::size_t n = local_dim();
  const double scale = alpha / static_cast<double>(agents());
  Vector rhs(dim());
  for (std::size_t k = 0; k < agents(); ++k) {
    const Vector& b = ensemble_.cost(k).b;
    for (std::size_t i = 0; i < n; ++i) rhs[k * n + i] = -scale * b[i];
  }
  return solve_spd(hessian(alpha), rhs);
}

MinimizerCurve LiftedObjective::minimizer_curve(std::span<const double> alphas) const {
  MinimizerCurve curve;
  curve.points.reserve(alphas.size());
  for (double alpha : alphas) {
    require_positive_alpha(alpha);
    MinimizerPoint p;
    p.alpha = alpha;
    p.x = minimizer(alpha);
    p.norm = norm(p.x);
    curve.points.push_back(std::move(p));
  }
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i];
    const auto& b = curve.points[i + 1];
    const double gap = std::abs(b.alpha - a.alpha);
    curve.lipschitz_ratios.push_back(gap > 0.0 ? distance(a.x, b.x) / gap : 0.0);
  }
  return curve;
}

double estimate_c1(const LiftedObjective& obj, std::span<const double> a, std::span<const double> b,
                   int samples) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "segment endpoints differ in size");
  samples = std::max(samples, 2);
  double best = 0.0;
  Vector p(a.size());
  for (int s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
    best = std::max(best, norm(obj.grad_F(p)));
  }
  return best;
}

double minimizer_lipschitz_bound(double alpha0, double mu, double c1, double alpha, double beta) {
  return 2.0 * alpha0 * c1 * std::abs(beta - alpha) / (mu * beta);
}

}  // namespace dgdlab
