#pragma once

#include <optional>
#include <string_view>

#include "dgdlab/costs.hpp"
#include "dgdlab/lifted.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab {

/// 2/(mu+L), the classical gradient-descent limit.
double classical_gd_bound(double mu, double big_l);

/// (1 + lambda_min(W)) / L
double yly_bound(double lambda_min, double big_l);

/// eta = mu*L/(mu+L)
double eta_constant(double mu, double big_l);

/// eta (1 - beta) / (L (eta + L))
double ck_bound(double mu, double big_l, double beta);

/// min(yly_bound, alpha_A). An infinite alpha_A leaves the mixing bound.
double main_bound(double mu, double big_l, double lambda_min, double alpha_A);

enum class EtaSource {
  aggregate_mu,    // mu of the aggregate cost f
  lifted_modulus,  // mu_G / alpha_0 from the lifted certificate
};

std::string_view to_string(EtaSource source);
EtaSource parse_eta_source(std::string_view text);

struct RadiusTerms {
  double mean_offset = 0.0;    // ||xbar(0) - x*||
  double consensus = 0.0;      // (L/eta) ||x(0) - xbar(0)||
  double heterogeneity = 0.0;  // sqrt(m) D alpha(0) / (eta(1-beta)/L - (eta+L) alpha(0))
  double radius = 0.0;         // max of the three
};

/// Radius of the trajectory envelope started at x0 with initial stepsize
/// alpha0. `mu` feeds eta; defaults to the aggregate mu when unset.
/// Throws radius_undefined unless alpha0 < eta(1-beta)/(L(eta+L)).
RadiusTerms radius_terms(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
                         std::span<const double> x0, double alpha0, std::optional<double> mu = {});

inline double radius_R(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
                       std::span<const double> x0, double alpha0, std::optional<double> mu = {}) {
  return radius_terms(ensemble, mixing, x0, alpha0, mu).radius;
}

/// Per-agent mean, as an n-vector.
Vector agent_mean(std::span<const double> stacked, std::size_t m);

struct BoundReport {
  double mu = 0.0;
  double smoothness_L = 0.0;
  double lambda_min = 0.0;
  double beta = 0.0;
  double alpha_gd = 0.0;
  double alpha_L = 0.0;
  double alpha_S = 0.0;
  double alpha_A = 0.0;  // +inf when unbounded
  double alpha_main = 0.0;
  double eta = 0.0;
  std::optional<double> radius_R;  // unset when alpha0 >= alpha_S
  double radius_alpha0 = 0.0;
  AlphaThreshold threshold;
  EtaSource eta_source = EtaSource::aggregate_mu;
};

/// Assembles every bound for one problem. The radius is evaluated at x0
/// (zeros when empty) and alpha0 (0.5 * alpha_S when unset).
BoundReport make_bound_report(const LiftedObjective& obj, const AlphaSearchOptions& search,
                              std::span<const double> x0 = {}, std::optional<double> alpha0 = {},
                              EtaSource eta_source = EtaSource::aggregate_mu);

}  // namespace dgdlab
