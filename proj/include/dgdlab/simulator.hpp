#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "dgdlab/costs.hpp"
#include "dgdlab/lifted.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab {

/// Constant alpha, or a/(t+w)^p with a > 0, w >= 1, 0 < p <= 1.
struct StepsizeSchedule {
  enum class Kind { constant, polynomial };

  Kind kind = Kind::constant;
  double alpha = 0.0;
  double a = 0.0;
  double w = 1.0;
  double p = 1.0;

  static StepsizeSchedule constant(double alpha);
  static StepsizeSchedule polynomial(double a, double w, double p);

  /// Throws invalid_schedule for parameters that are not a positive
  /// non-increasing sequence.
  void validate() const;
  double operator()(std::int64_t t) const;

  friend bool operator==(const StepsizeSchedule&, const StepsizeSchedule&) = default;
};

inline double schedule_eval(const StepsizeSchedule& s, std::int64_t t) { return s(t); }

/// How the scalar stepsize enters the per-agent gradient step.
///   lifted:      x(t+1) = (W kron I) x(t) - (alpha/m) stack(grad f_k)
///                which is exactly x - grad G_alpha(x).
///   agent_scale: x(t+1) = (W kron I) x(t) - alpha stack(grad f_k)
///                which equals x - grad G_{m alpha}(x).
enum class StepConvention { lifted, agent_scale };

/// Factor mapping a schedule stepsize to the lifted-objective stepsize.
double lifted_alpha_scale(StepConvention convention, std::size_t agents);

Vector step(std::span<const double> state, const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
            double alpha, StepConvention convention = StepConvention::lifted);

enum class Verdict { bounded, diverged, undecided };
std::string_view to_string(Verdict v);

struct StepMetrics {
  std::int64_t t = 0;
  double alpha = 0.0;
  double R = 0.0;              // sum_k ||x_k(t) - x*||
  double consensus_err = 0.0;  // ||x(t) - 1 kron xbar(t)||
  double mean_err = 0.0;       // ||xbar(t) - x*||
  double state_norm = 0.0;
  std::optional<double> dist_lifted_min;  // ||x(t) - x*^{alpha(t)}|| when certified
};

struct RecordedState {
  std::int64_t t = 0;
  Vector x;
};

struct TrajectoryRecord {
  std::vector<StepMetrics> metrics;
  std::vector<RecordedState> states;

  double max_R = 0.0;
  Verdict verdict = Verdict::bounded;
  std::optional<std::int64_t> divergence_step;
  std::int64_t horizon = 0;
  // Steps taken past the horizon while confirming exponential growth.
  std::int64_t extension_steps = 0;
  bool lifted_min_tracked = false;
};

struct RunOptions {
  std::int64_t horizon = 10000;
  double divergence_threshold = 1e12;  // on R(t)
  std::int64_t record_every = 10;
  StepConvention convention = StepConvention::lifted;
  // When increments are still growing at the horizon the run continues,
  // unrecorded, until R crosses the threshold or this many extra steps.
  std::int64_t extension_cap = 50'000'000;
  bool track_lifted_min = true;
};

/// Deterministic DGD run. Requires a strongly convex aggregate cost (R(t)
/// is measured against its minimizer).
TrajectoryRecord run(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
                     const StepsizeSchedule& schedule, std::span<const double> x0,
                     const RunOptions& options = {});

struct OracleVerdict {
  static constexpr double kBoundedSlack = 1e-12;
  static constexpr double kCriticalBand = 1e-6;

  double spectral_radius = 0.0;
  bool bounded = false;
  bool critical = false;  // |rho - 1| <= kCriticalBand
  SymMatrix matrix;       // W kron I_n - s blockdiag(A_k)
};

/// Exact boundedness verdict for a constant stepsize via the spectral
/// radius of the (symmetric) iteration matrix.
OracleVerdict boundedness_oracle(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing, double alpha,
                                 StepConvention convention = StepConvention::lifted);

struct NonexpansiveStep {
  std::int64_t t = 0;
  double alpha = 0.0;        // schedule stepsize alpha(t)
  double dist_before = 0.0;  // ||x(t)   - x*^{alpha(t)}||
  double dist_after = 0.0;   // ||x(t+1) - x*^{alpha(t)}||
  double dist_next = 0.0;    // ||x(t+1) - x*^{alpha(t+1)}||
  double drift = 0.0;        // 2 alpha0 C1 |alpha(t+1) - alpha(t)| / (mu alpha(t))
};

struct NonexpansivenessReport {
  static constexpr double kTolerance = 1e-9;

  std::vector<NonexpansiveStep> steps;
  double alpha0 = 0.0;  // lifted stepsize at t = 0
  double modulus = 0.0;
  int core_violations = 0;  // dist_after > dist_before + tol
  int full_violations = 0;  // dist_next > dist_before + drift + tol
  double max_core_excess = 0.0;
};

/// Per-step check of the non-expansive step towards the lifted minimizer.
/// The trajectory must store every state (record_every = 1) and every
/// stepsize must be certified and at most min(alpha_L, alpha_A).
NonexpansivenessReport nonexpansiveness_check(const TrajectoryRecord& trajectory, const LiftedObjective& obj,
                                              StepConvention convention = StepConvention::lifted,
                                              const AlphaSearchOptions& search = {});

/// CSV with header `t,alpha,R,consensus_err,dist_lifted_min`. An untracked
/// lifted distance is written as -1.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace dgdlab
