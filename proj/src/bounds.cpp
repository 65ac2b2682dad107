#include "dgdlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgdlab/error.hpp"

namespace dgdlab {

namespace {

void require_mu_le_l(double mu, double big_l) {
  if (!(mu > 0.0) || !(big_l >= mu) || !std::isfinite(big_l)) {
    std::ostringstream os;
    os << "need 0 < mu <= L, got mu = " << mu << ", L = " << big_l;
    throw Error(ErrorCode::validation, os.str());
  }
}

}  // namespace

double classical_gd_bound(double mu, double big_l) {
  require_mu_le_l(mu, big_l);
  return 2.0 / (mu + big_l);
}

double yly_bound(double lambda_min, double big_l) {
  if (!(big_l > 0.0)) throw Error(ErrorCode::validation, "L must be positive");
  if (!(lambda_min > -1.0 && lambda_min <= 1.0)) {
    throw Error(ErrorCode::validation, "lambda_min(W) must lie in (-1, 1]");
  }
  return (1.0 + lambda_min) / big_l;
}

double eta_constant(double mu, double big_l) {
  require_mu_le_l(mu, big_l);
  return mu * big_l / (mu + big_l);
}

double ck_bound(double mu, double big_l, double beta) {
  const double eta = eta_constant(mu, big_l);
  if (!(beta > -1.0 && beta < 1.0)) throw Error(ErrorCode::validation, "beta must lie in (-1, 1)");
  return eta * (1.0 - beta) / (big_l * (eta + big_l));
}

double main_bound(double mu, double big_l, double lambda_min, double alpha_A) {
  (void)mu;
  return std::min(yly_bound(lambda_min, big_l), alpha_A);
}

std::string_view to_string(EtaSource source) {
  return source == EtaSource::aggregate_mu ? "aggregate_mu" : "lifted_modulus";
}

EtaSource parse_eta_source(std::string_view text) {
  if (text == "aggregate_mu") return EtaSource::aggregate_mu;
  if (text == "lifted_modulus") return EtaSource::lifted_modulus;
  throw Error(ErrorCode::config, "unknown eta source '" + std::string(text) + "'");
}

Vector agent_mean(std::span<const double> stacked, std::size_t m) {
  if (m == 0 || stacked.size() % m != 0) {
    throw Error(ErrorCode::dimension_mismatch, "stacked state is not a multiple of the agent count");
  }
  const std::size_t n = stacked.size() / m;
  Vector mean(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += stacked[k * n + i];
  }
  for (double& v : mean) v /= static_cast<double>(m);
  return mean;
}

RadiusTerms radius_terms(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
                         std::span<const double> x0, double alpha0, std::optional<double> mu) {
  const std::size_t m = ensemble.agents();
  const std::size_t n = ensemble.dim();
  if (mixing.agents() != m) throw Error(ErrorCode::dimension_mismatch, "mixing matrix size differs from m");
  if (x0.size() != m * n) throw Error(ErrorCode::dimension_mismatch, "x0 must have m*n entries");

  const double big_l = ensemble.smoothness_L();
  const double mu_used = mu.value_or(ensemble.aggregate_mu());
  const double beta = mixing.spectral().beta;
  const double limit = ck_bound(mu_used, big_l, beta);
  if (!(alpha0 > 0.0) || !(alpha0 < limit)) {
    std::ostringstream os;
    os << "radius undefined at alpha(0) = " << alpha0 << " (requires 0 < alpha(0) < " << limit << ")";
    throw Error(ErrorCode::radius_undefined, os.str());
  }
  const double eta = eta_constant(mu_used, big_l);
  const Vector& x_star = ensemble.minimizer();
  const Vector mean = agent_mean(x0, m);

  double spread = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x0[k * n + i] - mean[i];
      spread += d * d;
    }
  }

  RadiusTerms r;
  r.mean_offset = distance(mean, x_star);
  r.consensus = (big_l / eta) * std::sqrt(spread);
  r.heterogeneity = std::sqrt(static_cast<double>(m)) * ensemble.grad_bound_D() * alpha0 /
                    (eta * (1.0 - beta) / big_l - (eta + big_l) * alpha0);
  r.radius = std::max({r.mean_offset, r.consensus, r.heterogeneity});
  return r;
}

BoundReport make_bound_report(const LiftedObjective& obj, const AlphaSearchOptions& search,
                              std::span<const double> x0, std::optional<double> alpha0,
                              EtaSource eta_source) {
  const QuadraticEnsemble& e = obj.ensemble();
  const SpectralSummary& s = obj.mixing().spectral();
  if (!e.strongly_convex()) {
    throw Error(ErrorCode::not_strongly_convex, "aggregate cost is not strongly convex");
  }

  BoundReport r;
  r.mu = e.aggregate_mu();
  r.smoothness_L = e.smoothness_L();
  r.lambda_min = s.lambda_min;
  r.beta = s.beta;
  r.threshold = obj.find_alpha_A(search);
  r.eta_source = eta_source;

  const double mu_eta = eta_source == EtaSource::aggregate_mu
                            ? r.mu
                            : r.threshold.modulus / r.threshold.certified_alpha();
  r.alpha_gd = classical_gd_bound(r.mu, r.smoothness_L);
  r.alpha_L = yly_bound(r.lambda_min, r.smoothness_L);
  r.alpha_S = ck_bound(mu_eta, r.smoothness_L, r.beta);
  r.alpha_A = r.threshold.alpha_A;
  r.alpha_main = main_bound(r.mu, r.smoothness_L, r.lambda_min, r.alpha_A);
  r.eta = eta_constant(mu_eta, r.smoothness_L);

  Vector zeros;
  if (x0.empty()) {
    zeros.assign(obj.dim(), 0.0);
    x0 = zeros;
  }
  r.radius_alpha0 = alpha0.value_or(0.5 * r.alpha_S);
  if (r.radius_alpha0 > 0.0 && r.radius_alpha0 < r.alpha_S) {
    r.radius_R = radius_R(e, obj.mixing(), x0, r.radius_alpha0, mu_eta);
  }
  return r;
}

}  // namespace dgdlab
