#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "dgdlab/bounds.hpp"
#include "dgdlab/experiments.hpp"
#include "dgdlab/simulator.hpp"
#include "dgdlab/topology.hpp"

namespace dgdlab {

/// Finite values become numbers; +-inf and NaN become the strings "inf",
/// "-inf" and "nan".
nlohmann::json json_number(double v);

nlohmann::json to_json(const SpectralSummary& s);
nlohmann::json to_json(const AlphaThreshold& t);
nlohmann::json to_json(const BoundReport& r);
/// Oracle fields without the iteration matrix.
nlohmann::json to_json(const OracleVerdict& v);
nlohmann::json trajectory_summary(const TrajectoryRecord& r);
nlohmann::json to_json(const SimulationResult& r);
nlohmann::json to_json(const SweepAlphaResult& r);

/// Long form `alpha_multiple,t,R`, one row per recorded step of every run.
void write_sweep_alpha_csv(std::ostream& os, const SweepAlphaResult& r);
/// `epsilon,alpha_A,alpha_L,alpha_S`; missing values are empty fields.
void write_sweep_epsilon_csv(std::ostream& os, const std::vector<EpsilonRow>& rows);
nlohmann::json to_json(const std::vector<EpsilonRow>& rows);

}  // namespace dgdlab
