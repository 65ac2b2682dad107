#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgdlab/bounds.hpp"
#include "dgdlab/config.hpp"
#include "dgdlab/lifted.hpp"
#include "dgdlab/simulator.hpp"

namespace dgdlab {

/// Builds and validates every spec in the config before any computation.
LiftedObjective build_problem(const ExperimentConfig& config);

/// alpha_A expressed in schedule units (divided by m under agent_scale).
/// Infinite when the threshold is unbounded.
double schedule_alpha_A(const AlphaThreshold& threshold, StepConvention convention, std::size_t agents);

/// Stepsize that `multiple` of the reference denotes, in schedule units.
double reference_alpha(AlphaReference reference, const BoundReport& report, StepConvention convention,
                       std::size_t agents, double multiple);

Vector initial_state(const ExperimentConfig& config, const LiftedObjective& obj);

BoundReport compute_bounds(const ExperimentConfig& config, const LiftedObjective& obj);

struct SimulationResult {
  StepsizeSchedule schedule;
  TrajectoryRecord record;
  std::optional<OracleVerdict> oracle;  // constant schedules only
  BoundReport bounds;
};

SimulationResult simulate(const ExperimentConfig& config, const LiftedObjective& obj);

struct SweepAlphaRun {
  double multiple = 0.0;
  double alpha = 0.0;
  TrajectoryRecord record;
  OracleVerdict oracle;
};

struct SweepAlphaResult {
  BoundReport bounds;
  std::vector<SweepAlphaRun> runs;  // ordered as the configured multiples
};

SweepAlphaResult sweep_alpha(const ExperimentConfig& config, const LiftedObjective& obj);

struct EpsilonRow {
  double epsilon = 0.0;
  std::optional<double> alpha_A;  // schedule units; unset when missing
  std::optional<double> alpha_L;
  std::optional<double> alpha_S;
  std::string status;  // ok | unbounded | not_in_class | not_strongly_convex | error
};

/// Re-runs the alpha_A search with the ensemble's epsilon replaced by each
/// grid value. Only epsilon_example and random ensembles have an epsilon.
std::vector<EpsilonRow> sweep_epsilon(const ExperimentConfig& config);

/// Worker count for sweeps: DGD_LAB_THREADS when set, otherwise the
/// hardware concurrency.
unsigned sweep_threads();

/// Runs task(i) for i in [0, count) on up to sweep_threads() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace dgdlab
