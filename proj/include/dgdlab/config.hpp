#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dgdlab/bounds.hpp"
#include "dgdlab/costs.hpp"
#include "dgdlab/lifted.hpp"
#include "dgdlab/simulator.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab {

struct RandomEnsembleSpec {
  std::size_t m = 3;
  std::size_t n = 2;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
  friend bool operator==(const RandomEnsembleSpec&, const RandomEnsembleSpec&) = default;
};

struct EpsilonExampleSpec {
  double big_l = 10.0;
  double mu = 1.0;
  double epsilon = 0.0;
  friend bool operator==(const EpsilonExampleSpec&, const EpsilonExampleSpec&) = default;
};

struct ExplicitCostSpec {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  friend bool operator==(const ExplicitCostSpec&, const ExplicitCostSpec&) = default;
};

struct ExplicitEnsembleSpec {
  std::vector<ExplicitCostSpec> costs;
  friend bool operator==(const ExplicitEnsembleSpec&, const ExplicitEnsembleSpec&) = default;
};

using EnsembleSpec = std::variant<RandomEnsembleSpec, EpsilonExampleSpec, ExplicitEnsembleSpec>;

struct ExplicitMixingSpec {
  std::vector<std::vector<double>> w;
  friend bool operator==(const ExplicitMixingSpec&, const ExplicitMixingSpec&) = default;
};

struct MetropolisMixingSpec {
  std::vector<std::vector<int>> adjacency;
  friend bool operator==(const MetropolisMixingSpec&, const MetropolisMixingSpec&) = default;
};

using MixingSpec = std::variant<ExplicitMixingSpec, MetropolisMixingSpec>;

/// Stepsize reference for schedules and sweeps given as multiples.
enum class AlphaReference { alpha_A, alpha_main };

struct ScheduleSpec {
  StepsizeSchedule::Kind kind = StepsizeSchedule::Kind::constant;
  std::optional<double> alpha;           // constant, absolute
  std::optional<double> alpha_multiple;  // constant, times the reference
  AlphaReference reference = AlphaReference::alpha_A;
  double a = 0.0;
  double w = 1.0;
  double p = 1.0;
  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct SweepSpec {
  std::vector<double> alpha_multiples{0.5, 0.95, 0.99, 1.01, 1.02};
  AlphaReference reference = AlphaReference::alpha_A;
  std::vector<double> epsilons;  // default 0.5, 1.0, ..., 10.0
  SweepSpec();
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  EnsembleSpec ensemble = EpsilonExampleSpec{};
  MixingSpec mixing = ExplicitMixingSpec{};
  ScheduleSpec schedule;
  std::int64_t horizon = 10000;
  std::int64_t record_every = 10;
  double divergence_threshold = 1e12;
  bool agent_scale = false;
  std::optional<std::vector<double>> x0;
  AlphaSearchOptions alpha_search;
  EtaSource eta_source = EtaSource::aggregate_mu;
  std::optional<double> radius_alpha0;
  SweepSpec sweep;

  StepConvention convention() const noexcept {
    return agent_scale ? StepConvention::agent_scale : StepConvention::lifted;
  }
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// Parses a JSON config document. Unknown keys and malformed values raise
/// ErrorCode::config. Construction-level checks (symmetry, stochasticity)
/// happen later in build_problem.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical form: every field present, defaults filled in.
nlohmann::json serialize_config(const ExperimentConfig& config);

nlohmann::json mixing_spec_json(const MixingSpec& spec);
MixingSpec parse_mixing_spec(const nlohmann::json& doc);

QuadraticEnsemble build_ensemble(const EnsembleSpec& spec);
MixingMatrix build_mixing(const MixingSpec& spec);

}  // namespace dgdlab
