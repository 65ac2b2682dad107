#include "dgdlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dgdlab/bounds.hpp"
#include "dgdlab/error.hpp"

namespace dgdlab {

StepsizeSchedule StepsizeSchedule::constant(double alpha) {
  StepsizeSchedule s;
  s.kind = Kind::constant;
  s.alpha = alpha;
  s.validate();
  return s;
}

StepsizeSchedule StepsizeSchedule::polynomial(double a, double w, double p) {
  StepsizeSchedule s;
  s.kind = Kind::polynomial;
  s.a = a;
  s.w = w;
  s.p = p;
  s.validate();
  return s;
}

void StepsizeSchedule::validate() const {
  std::ostringstream os;
  if (kind == Kind::constant) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) os << "constant stepsize must be positive, got " << alpha;
  } else {
    if (!(a > 0.0) || !std::isfinite(a)) os << "polynomial schedule needs a > 0, got " << a;
    else if (!(w >= 1.0) || !std::isfinite(w)) os << "polynomial schedule needs w >= 1, got " << w;
    else if (!(p > 0.0 && p <= 1.0)) os << "polynomial schedule needs 0 < p <= 1, got " << p;
  }
  if (!os.str().empty()) throw Error(ErrorCode::invalid_schedule, os.str());
}

double StepsizeSchedule::operator()(std::int64_t t) const {
  if (t < 0) throw Error(ErrorCode::validation, "schedule evaluated at negative t");
  if (kind == Kind::constant) return alpha;
  return a / std::pow(static_cast<double>(t) + w, p);
}

double lifted_alpha_scale(StepConvention convention, std::size_t agents) {
  return convention == StepConvention::lifted ? 1.0 : static_cast<double>(agents);
}

namespace {

double agent_step_scale(StepConvention convention, std::size_t agents) {
  return convention == StepConvention::lifted ? 1.0 / static_cast<double>(agents) : 1.0;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Vector step(std::span<const double> state, const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
            double alpha, StepConvention convention) {
  const std::size_t m = ensemble.agents();
  const std::size_t n = ensemble.dim();
  if (mixing.agents() != m) throw Error(ErrorCode::dimension_mismatch, "mixing matrix size differs from m");
  if (state.size() != m * n) throw Error(ErrorCode::dimension_mismatch, "state must have m*n entries");
  if (!(alpha > 0.0)) throw Error(ErrorCode::validation, "stepsize must be positive");
  if (!all_finite(state)) throw Error(ErrorCode::numerical, "non-finite state passed to step");

  const double s = alpha * agent_step_scale(convention, m);
  Vector next = mixing.mix(state, n);
  for (std::size_t k = 0; k < m; ++k) {
    const Vector g = grad(ensemble.cost(k), state.subspan(k * n, n));
    for (std::size_t i = 0; i < n; ++i) next[k * n + i] -= s * g[i];
  }
  return next;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::diverged: return "diverged";
    case Verdict::undecided: return "undecided";
  }
  return "unknown";
}

namespace {

class MetricsProbe {
 public:
  MetricsProbe(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing, StepConvention convention,
               bool track, double alpha0)
      : m_(ensemble.agents()),
        n_(ensemble.dim()),
        x_star_(ensemble.minimizer()),
        lifted_(ensemble, mixing),
        scale_(lifted_alpha_scale(convention, ensemble.agents())) {
    tracked_ = track && lifted_.certify(scale_ * alpha0).is_strongly_convex;
  }

  bool tracked() const noexcept { return tracked_; }

  StepMetrics measure(std::int64_t t, double alpha, std::span<const double> x) {
    StepMetrics s;
    s.t = t;
    s.alpha = alpha;
    const Vector mean = agent_mean(x, m_);
    double spread = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
      const auto xk = x.subspan(k * n_, n_);
      s.R += distance(xk, x_star_);
      for (std::size_t i = 0; i < n_; ++i) spread += (xk[i] - mean[i]) * (xk[i] - mean[i]);
    }
    s.consensus_err = std::sqrt(spread);
    s.mean_err = distance(mean, x_star_);
    s.state_norm = norm(x);
    if (tracked_) s.dist_lifted_min = distance(x, lifted_minimizer(alpha));
    return s;
  }

 private:
  const Vector& lifted_minimizer(double alpha) {
    if (alpha != cached_alpha_) {
      cached_min_ = lifted_.minimizer(scale_ * alpha);
      cached_alpha_ = alpha;
    }
    return cached_min_;
  }

  std::size_t m_;
  std::size_t n_;
  Vector x_star_;
  LiftedObjective lifted_;
  double scale_;
  bool tracked_ = false;
  double cached_alpha_ = -1.0;
  Vector cached_min_;
};

}  // namespace

TrajectoryRecord run(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing,
                     const StepsizeSchedule& schedule, std::span<const double> x0, const RunOptions& options) {
  schedule.validate();
  if (options.horizon < 1) throw Error(ErrorCode::validation, "horizon must be >= 1");
  if (options.record_every < 1) throw Error(ErrorCode::validation, "record_every must be >= 1");
  if (x0.size() != ensemble.agents() * ensemble.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "x0 must have m*n entries");
  }
  if (!all_finite(x0)) throw Error(ErrorCode::validation, "x0 must be finite");

  MetricsProbe probe(ensemble, mixing, options.convention, options.track_lifted_min, schedule(0));
  TrajectoryRecord rec;
  rec.horizon = options.horizon;
  rec.lifted_min_tracked = probe.tracked();

  const auto diverging = [&](const StepMetrics& s) {
    return !(s.R <= options.divergence_threshold);
  };

  Vector x(x0.begin(), x0.end());
  Vector prev;
  double last_increment = -1.0;
  double prev_increment = -1.0;
  for (std::int64_t t = 0;; ++t) {
    const double alpha = schedule(t);
    StepMetrics s = probe.measure(t, alpha, x);
    rec.max_R = std::max(rec.max_R, s.R);
    const bool stop = diverging(s);
    rec.metrics.push_back(s);
    if (t % options.record_every == 0 || t == options.horizon || stop) rec.states.push_back({t, x});
    if (stop) {
      rec.verdict = Verdict::diverged;
      rec.divergence_step = t;
      return rec;
    }
    if (t == options.horizon) break;
    Vector next = step(x, ensemble, mixing, alpha, options.convention);
    prev_increment = last_increment;
    last_increment = distance(next, x);
    x = std::move(next);
  }

  // The increments of the affine recursion evolve under the symmetric
  // iteration matrix, so for constant stepsizes their norm is log-convex in
  // t: once it grows it keeps growing. Growth above the rounding floor at the
  // horizon therefore means divergence; confirm it by iterating on.
  const auto above_floor = [&](double inc) { return inc > 1e-9 * std::max(1.0, norm(x)); };
  if (!(last_increment > prev_increment && above_floor(last_increment))) return rec;

  for (std::int64_t t = options.horizon + 1; t <= options.horizon + options.extension_cap; ++t) {
    const double alpha = schedule(t - 1);
    Vector next = step(x, ensemble, mixing, alpha, options.convention);
    const double inc = distance(next, x);
    x = std::move(next);
    ++rec.extension_steps;
    const StepMetrics s = probe.measure(t, schedule(t), x);
    if (diverging(s)) {
      rec.max_R = std::max(rec.max_R, s.R);
      rec.metrics.push_back(s);
      rec.states.push_back({t, x});
      rec.verdict = Verdict::diverged;
      rec.divergence_step = t;
      return rec;
    }
    if (inc <= last_increment) return rec;  // growth stalled; treat as bounded
    last_increment = inc;
  }
  rec.verdict = Verdict::undecided;
  return rec;
}

OracleVerdict boundedness_oracle(const QuadraticEnsemble& ensemble, const MixingMatrix& mixing, double alpha,
                                 StepConvention convention) {
  const std::size_t m = ensemble.agents();
  const std::size_t n = ensemble.dim();
  if (mixing.agents() != m) throw Error(ErrorCode::dimension_mismatch, "mixing matrix size differs from m");
  if (!(alpha > 0.0)) throw Error(ErrorCode::validation, "stepsize must be positive");

  const double s = alpha * agent_step_scale(convention, m);
  SymMatrix mat(m * n);
  const SymMatrix& w = mixing.weights();
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = k; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) mat.set(k * n + i, j * n + i, w(k, j));
    }
    const SymMatrix& a = ensemble.cost(k).a;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) mat.add(k * n + i, k * n + j, -s * a(i, j));
    }
  }

  const auto ev = sym_eigen(mat).eigenvalues;
  OracleVerdict v;
  v.spectral_radius = std::max(std::abs(ev.front()), std::abs(ev.back()));
  v.bounded = v.spectral_radius <= 1.0 + OracleVerdict::kBoundedSlack;
  v.critical = std::abs(v.spectral_radius - 1.0) <= OracleVerdict::kCriticalBand;
  v.matrix = std::move(mat);
  return v;
}

NonexpansivenessReport nonexpansiveness_check(const TrajectoryRecord& trajectory, const LiftedObjective& obj,
                                              StepConvention convention, const AlphaSearchOptions& search) {
  const auto& states = trajectory.states;
  const auto& metrics = trajectory.metrics;
  if (states.size() != metrics.size()) {
    throw Error(ErrorCode::validation, "non-expansiveness check needs every state (record_every = 1)");
  }
  if (metrics.size() < 2) throw Error(ErrorCode::validation, "trajectory has fewer than two steps");

  const double scale = lifted_alpha_scale(convention, obj.agents());
  const AlphaThreshold threshold = obj.find_alpha_A(search);
  const double alpha_l = yly_bound(obj.mixing().spectral().lambda_min, obj.ensemble().smoothness_L());
  const double limit = std::min(alpha_l, threshold.certified_alpha() / scale);

  NonexpansivenessReport report;
  report.alpha0 = scale * metrics.front().alpha;
  const ScCertificate c0 = obj.certify(report.alpha0);
  report.modulus = c0.modulus;

  Vector current_min;
  double current_alpha = -1.0;
  for (std::size_t i = 0; i + 1 < metrics.size(); ++i) {
    const double a_t = metrics[i].alpha;
    const double a_next = metrics[i + 1].alpha;
    for (double a : {a_t, a_next}) {
      if (a > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "stepsize " << a << " exceeds min(alpha_L, alpha_A) = " << limit;
        throw Error(ErrorCode::not_strongly_convex, os.str());
      }
    }
    if (a_t != current_alpha) {
      current_min = obj.minimizer(scale * a_t);  // throws when uncertified
      current_alpha = a_t;
    }
    const Vector next_min = a_next == a_t ? current_min : obj.minimizer(scale * a_next);

    NonexpansiveStep s;
    s.t = metrics[i].t;
    s.alpha = a_t;
    s.dist_before = distance(states[i].x, current_min);
    s.dist_after = distance(states[i + 1].x, current_min);
    s.dist_next = distance(states[i + 1].x, next_min);
    if (a_next != a_t) {
      const double c1 = estimate_c1(obj, current_min, next_min);
      s.drift = minimizer_lipschitz_bound(report.alpha0, report.modulus, c1, scale * a_next, scale * a_t);
    }
    const double excess = s.dist_after - s.dist_before;
    report.max_core_excess = std::max(report.max_core_excess, excess);
    if (excess > NonexpansivenessReport::kTolerance) ++report.core_violations;
    if (s.dist_next > s.dist_before + s.drift + NonexpansivenessReport::kTolerance) ++report.full_violations;
    report.steps.push_back(s);

    current_min = next_min;
    current_alpha = a_next;
  }
  return report;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "t,alpha,R,consensus_err,dist_lifted_min\n";
  const auto old_precision = os.precision(17);
  for (const auto& s : record.metrics) {
    os << s.t << ',' << s.alpha << ',' << s.R << ',' << s.consensus_err << ','
       << s.dist_lifted_min.value_or(-1.0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace dgdlab
