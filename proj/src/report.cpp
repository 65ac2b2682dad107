#include "dgdlab/report.hpp"

#include <cmath>
#include <ostream>

namespace dgdlab {

using nlohmann::json;

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); }

struct PrecisionGuard {
  explicit PrecisionGuard(std::ostream& os) : os_(os), old_(os.precision(17)) {}
  ~PrecisionGuard() { os_.precision(old_); }
  std::ostream& os_;
  std::streamsize old_;
};

}  // namespace

json to_json(const SpectralSummary& s) {
  return {{"lambda_min", s.lambda_min},
          {"beta", s.beta},
          {"beta_abs", s.beta_abs},
          {"spectral_gap", s.spectral_gap},
          {"single_agent", s.single_agent}};
}

json to_json(const AlphaThreshold& t) {
  return {{"alpha_A", json_number(t.alpha_A)},
          {"method", to_string(t.method)},
          {"resolution", t.resolution},
          {"scan_cap", t.scan_cap},
          {"unbounded", t.unbounded},
          {"modulus", t.modulus}};
}

json to_json(const BoundReport& r) {
  return {{"alpha_gd", json_number(r.alpha_gd)},
          {"alpha_L", json_number(r.alpha_L)},
          {"alpha_S", json_number(r.alpha_S)},
          {"alpha_A", json_number(r.alpha_A)},
          {"alpha_main", json_number(r.alpha_main)},
          {"eta", json_number(r.eta)},
          {"radius_R", optional_number(r.radius_R)},
          {"radius_alpha0", json_number(r.radius_alpha0)},
          {"mu", r.mu},
          {"L", r.smoothness_L},
          {"lambda_min", r.lambda_min},
          {"beta", r.beta},
          {"eta_source", to_string(r.eta_source)},
          {"alpha_A_provenance", to_json(r.threshold)}};
}

json to_json(const OracleVerdict& v) {
  return {{"spectral_radius", v.spectral_radius},
          {"bounded", v.bounded},
          {"critical", v.critical},
          {"verdict", v.critical ? "critical" : (v.bounded ? "bounded" : "diverged")}};
}

json trajectory_summary(const TrajectoryRecord& r) {
  json out = {{"verdict", to_string(r.verdict)},
              {"max_R", json_number(r.max_R)},
              {"horizon", r.horizon},
              {"steps_recorded", r.metrics.size()},
              {"extension_steps", r.extension_steps},
              {"lifted_min_tracked", r.lifted_min_tracked},
              {"divergence_step", r.divergence_step ? json(*r.divergence_step) : json(nullptr)}};
  if (!r.metrics.empty()) {
    const StepMetrics& last = r.metrics.back();
    out["final"] = {{"t", last.t},
                    {"R", json_number(last.R)},
                    {"consensus_err", json_number(last.consensus_err)},
                    {"dist_lifted_min", optional_number(last.dist_lifted_min)}};
  }
  return out;
}

json to_json(const SimulationResult& r) {
  json schedule = r.schedule.kind == StepsizeSchedule::Kind::constant
                      ? json{{"type", "constant"}, {"alpha", r.schedule.alpha}}
                      : json{{"type", "polynomial"}, {"a", r.schedule.a}, {"w", r.schedule.w}, {"p", r.schedule.p}};
  json out = {{"schedule", schedule}, {"trajectory", trajectory_summary(r.record)}, {"bounds", to_json(r.bounds)}};
  out["oracle"] = r.oracle ? to_json(*r.oracle) : json(nullptr);
  return out;
}

json to_json(const SweepAlphaResult& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"alpha_multiple", run.multiple},
                    {"alpha", run.alpha},
                    {"trajectory", trajectory_summary(run.record)},
                    {"oracle", to_json(run.oracle)}});
  }
  return {{"bounds", to_json(r.bounds)}, {"runs", runs}};
}

void write_sweep_alpha_csv(std::ostream& os, const SweepAlphaResult& r) {
  PrecisionGuard guard(os);
  os << "alpha_multiple,t,R\n";
  for (const auto& run : r.runs) {
    for (const auto& s : run.record.metrics) os << run.multiple << ',' << s.t << ',' << s.R << '\n';
  }
}

void write_sweep_epsilon_csv(std::ostream& os, const std::vector<EpsilonRow>& rows) {
  PrecisionGuard guard(os);
  os << "epsilon,alpha_A,alpha_L,alpha_S\n";
  const auto field = [&](const std::optional<double>& v) {
    if (v && std::isfinite(*v)) os << *v;
  };
  for (const auto& row : rows) {
    os << row.epsilon << ',';
    field(row.alpha_A);
    os << ',';
    field(row.alpha_L);
    os << ',';
    field(row.alpha_S);
    os << '\n';
  }
}

json to_json(const std::vector<EpsilonRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"epsilon", row.epsilon},
                   {"alpha_A", optional_number(row.alpha_A)},
                   {"alpha_L", optional_number(row.alpha_L)},
                   {"alpha_S", optional_number(row.alpha_S)},
                   {"status", row.status}});
  }
  return out;
}

}  // namespace dgdlab
