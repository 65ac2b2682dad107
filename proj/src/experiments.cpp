#include "dgdlab/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "dgdlab/error.hpp"

namespace dgdlab {

LiftedObjective build_problem(const ExperimentConfig& config) {
  QuadraticEnsemble ensemble = build_ensemble(config.ensemble);
  MixingMatrix mixing = build_mixing(config.mixing);
  if (config.x0 && config.x0->size() != ensemble.agents() * ensemble.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "x0 must have m*n entries");
  }
  if (config.schedule.kind == StepsizeSchedule::Kind::polynomial) {
    StepsizeSchedule::polynomial(config.schedule.a, config.schedule.w, config.schedule.p);
  } else if (config.schedule.alpha) {
    StepsizeSchedule::constant(*config.schedule.alpha);
  }
  return LiftedObjective(std::move(ensemble), std::move(mixing));
}

double schedule_alpha_A(const AlphaThreshold& threshold, StepConvention convention, std::size_t agents) {
  if (threshold.unbounded) return std::numeric_limits<double>::infinity();
  return threshold.alpha_A / lifted_alpha_scale(convention, agents);
}

double reference_alpha(AlphaReference reference, const BoundReport& report, StepConvention convention,
                       std::size_t agents, double multiple) {
  const double alpha_a = schedule_alpha_A(report.threshold, convention, agents);
  const double base = reference == AlphaReference::alpha_A ? alpha_a : std::min(report.alpha_L, alpha_a);
  if (!std::isfinite(base)) {
    throw Error(ErrorCode::not_in_class,
                "alpha_A is unbounded up to the scan cap; give an absolute stepsize or use alpha_main");
  }
  return multiple * base;
}

Vector initial_state(const ExperimentConfig& config, const LiftedObjective& obj) {
  return config.x0 ? *config.x0 : Vector(obj.dim(), 0.0);
}

BoundReport compute_bounds(const ExperimentConfig& config, const LiftedObjective& obj) {
  const Vector x0 = initial_state(config, obj);
  BoundReport r = make_bound_report(obj, config.alpha_search, x0, config.radius_alpha0, config.eta_source);
  // Reported stepsizes are in schedule units.
  if (config.agent_scale) {
    r.alpha_A = schedule_alpha_A(r.threshold, config.convention(), obj.agents());
    r.alpha_main = std::min(r.alpha_L, r.alpha_A);
  }
  return r;
}

namespace {

RunOptions run_options(const ExperimentConfig& config) {
  RunOptions o;
  o.horizon = config.horizon;
  o.record_every = config.record_every;
  o.divergence_threshold = config.divergence_threshold;
  o.convention = config.convention();
  return o;
}

}  // namespace

SimulationResult simulate(const ExperimentConfig& config, const LiftedObjective& obj) {
  SimulationResult out;
  const ScheduleSpec& spec = config.schedule;
  const bool needs_threshold = spec.kind == StepsizeSchedule::Kind::constant && spec.alpha_multiple.has_value();
  if (needs_threshold || obj.ensemble().strongly_convex()) out.bounds = compute_bounds(config, obj);

  if (spec.kind == StepsizeSchedule::Kind::polynomial) {
    out.schedule = StepsizeSchedule::polynomial(spec.a, spec.w, spec.p);
  } else {
    const double alpha = spec.alpha ? *spec.alpha
                                    : reference_alpha(spec.reference, out.bounds, config.convention(),
                                                      obj.agents(), *spec.alpha_multiple);
    out.schedule = StepsizeSchedule::constant(alpha);
    out.oracle = boundedness_oracle(obj.ensemble(), obj.mixing(), alpha, config.convention());
  }
  const Vector x0 = initial_state(config, obj);
  out.record = run(obj.ensemble(), obj.mixing(), out.schedule, x0, run_options(config));
  return out;
}

SweepAlphaResult sweep_alpha(const ExperimentConfig& config, const LiftedObjective& obj) {
  SweepAlphaResult out;
  out.bounds = compute_bounds(config, obj);
  const Vector x0 = initial_state(config, obj);
  const RunOptions options = run_options(config);

  const auto& multiples = config.sweep.alpha_multiples;
  out.runs.resize(multiples.size());
  for (std::size_t i = 0; i < multiples.size(); ++i) {
    out.runs[i].multiple = multiples[i];
    out.runs[i].alpha =
        reference_alpha(config.sweep.reference, out.bounds, config.convention(), obj.agents(), multiples[i]);
  }
  parallel_for(out.runs.size(), [&](std::size_t i) {
    SweepAlphaRun& r = out.runs[i];
    const auto schedule = StepsizeSchedule::constant(r.alpha);
    r.record = run(obj.ensemble(), obj.mixing(), schedule, x0, options);
    r.oracle = boundedness_oracle(obj.ensemble(), obj.mixing(), r.alpha, config.convention());
    r.oracle.matrix = SymMatrix();
  });
  return out;
}

std::vector<EpsilonRow> sweep_epsilon(const ExperimentConfig& config) {
  if (std::holds_alternative<ExplicitEnsembleSpec>(config.ensemble)) {
    throw Error(ErrorCode::config, "sweep-epsilon needs an epsilon_example or random ensemble");
  }
  const MixingMatrix mixing = build_mixing(config.mixing);
  const auto& epsilons = config.sweep.epsilons;
  std::vector<EpsilonRow> rows(epsilons.size());

  parallel_for(rows.size(), [&](std::size_t i) {
    EpsilonRow& row = rows[i];
    row.epsilon = epsilons[i];
    EnsembleSpec spec = config.ensemble;
    std::visit(
        [&](auto& s) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, ExplicitEnsembleSpec>) s.epsilon = row.epsilon;
        },
        spec);
    try {
      const LiftedObjective obj(build_ensemble(spec), mixing);
      const QuadraticEnsemble& e = obj.ensemble();
      const SpectralSummary& sp = mixing.spectral();
      row.alpha_L = yly_bound(sp.lambda_min, e.smoothness_L());
      if (!e.strongly_convex()) {
        row.status = "not_strongly_convex";
        return;
      }
      row.alpha_S = ck_bound(e.aggregate_mu(), e.smoothness_L(), sp.beta);
      const AlphaThreshold th = obj.find_alpha_A(config.alpha_search);
      if (th.unbounded) {
        row.status = "unbounded";
        return;
      }
      row.alpha_A = schedule_alpha_A(th, config.convention(), obj.agents());
      row.status = "ok";
    } catch (const Error& err) {
      row.status = err.code() == ErrorCode::not_in_class ? "not_in_class" : "error";
    }
  });
  return rows;
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("DGD_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(sweep_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dgdlab
