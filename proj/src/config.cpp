#include "dgdlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dgdlab/error.hpp"

namespace dgdlab {

using nlohmann::json;

SweepSpec::SweepSpec() {
  for (int k = 1; k <= 20; ++k) epsilons.push_back(0.5 * k);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.ensemble == b.ensemble && a.mixing == b.mixing && a.schedule == b.schedule &&
         a.horizon == b.horizon && a.record_every == b.record_every &&
         a.divergence_threshold == b.divergence_threshold && a.agent_scale == b.agent_scale && a.x0 == b.x0 &&
         a.alpha_search.method == b.alpha_search.method &&
         a.alpha_search.resolution == b.alpha_search.resolution &&
         a.alpha_search.grid_n == b.alpha_search.grid_n && a.alpha_search.scan_cap == b.alpha_search.scan_cap &&
         a.eta_source == b.eta_source && a.radius_alpha0 == b.radius_alpha0 && a.sweep == b.sweep;
}

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(where, "expected an object");
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) config_error(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) config_error(where, std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + key, e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

std::string_view reference_name(AlphaReference r) { return r == AlphaReference::alpha_A ? "alpha_A" : "alpha_main"; }

AlphaReference parse_reference(const std::string& s, const std::string& where) {
  if (s == "alpha_A") return AlphaReference::alpha_A;
  if (s == "alpha_main") return AlphaReference::alpha_main;
  config_error(where, "reference must be alpha_A or alpha_main, got '" + s + "'");
}

EnsembleSpec parse_ensemble(const json& doc) {
  const std::string where = "ensemble";
  if (!doc.is_object()) config_error(where, "expected an object");
  const auto type = get<std::string>(doc, "type", where);
  if (type == "random") {
    check_keys(doc, where, {"type", "m", "n", "epsilon", "seed"});
    RandomEnsembleSpec s;
    s.m = get<std::size_t>(doc, "m", where);
    s.n = get<std::size_t>(doc, "n", where);
    s.epsilon = get<double>(doc, "epsilon", where);
    s.seed = get_or<std::uint64_t>(doc, "seed", 0, where);
    return s;
  }
  if (type == "epsilon_example") {
    check_keys(doc, where, {"type", "L", "mu", "epsilon"});
    EpsilonExampleSpec s;
    s.big_l = get_or<double>(doc, "L", 10.0, where);
    s.mu = get_or<double>(doc, "mu", 1.0, where);
    s.epsilon = get_or<double>(doc, "epsilon", 0.0, where);
    return s;
  }
  if (type == "explicit") {
    check_keys(doc, where, {"type", "costs"});
    ExplicitEnsembleSpec s;
    if (!doc.contains("costs")) config_error(where, "missing key 'costs'");
    const json& costs = doc.at("costs");
    if (!costs.is_array() || costs.empty()) config_error(where, "costs must be a non-empty array");
    for (const auto& c : costs) {
      check_keys(c, where + ".costs[]", {"A", "b"});
      s.costs.push_back({get<std::vector<std::vector<double>>>(c, "A", where + ".costs[]"),
                         get<std::vector<double>>(c, "b", where + ".costs[]")});
    }
    return s;
  }
  config_error(where, "unknown ensemble type '" + type + "'");
}

json ensemble_json(const EnsembleSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RandomEnsembleSpec>) {
          return {{"type", "random"}, {"m", s.m}, {"n", s.n}, {"epsilon", s.epsilon}, {"seed", s.seed}};
        } else if constexpr (std::is_same_v<T, EpsilonExampleSpec>) {
          return {{"type", "epsilon_example"}, {"L", s.big_l}, {"mu", s.mu}, {"epsilon", s.epsilon}};
        } else {
          json costs = json::array();
          for (const auto& c : s.costs) costs.push_back({{"A", c.a}, {"b", c.b}});
          return {{"type", "explicit"}, {"costs", costs}};
        }
      },
      spec);
}

ScheduleSpec parse_schedule(const json& doc) {
  const std::string where = "schedule";
  ScheduleSpec s;
  const auto type = get<std::string>(doc, "type", where);
  if (type == "constant") {
    check_keys(doc, where, {"type", "alpha", "alpha_multiple", "reference"});
    s.kind = StepsizeSchedule::Kind::constant;
    if (doc.contains("alpha")) s.alpha = get<double>(doc, "alpha", where);
    if (doc.contains("alpha_multiple")) s.alpha_multiple = get<double>(doc, "alpha_multiple", where);
    if (s.alpha.has_value() == s.alpha_multiple.has_value()) {
      config_error(where, "constant schedule needs exactly one of 'alpha' or 'alpha_multiple'");
    }
    if (s.alpha_multiple && !(*s.alpha_multiple > 0.0)) config_error(where, "alpha_multiple must be positive");
    s.reference = parse_reference(get_or<std::string>(doc, "reference", "alpha_A", where), where);
    return s;
  }
  if (type == "polynomial") {
    check_keys(doc, where, {"type", "a", "w", "p"});
    s.kind = StepsizeSchedule::Kind::polynomial;
    s.a = get<double>(doc, "a", where);
    s.w = get_or<double>(doc, "w", 1.0, where);
    s.p = get_or<double>(doc, "p", 1.0, where);
    return s;
  }
  config_error(where, "unknown schedule type '" + type + "'");
}

json schedule_json(const ScheduleSpec& s) {
  if (s.kind == StepsizeSchedule::Kind::polynomial) {
    return {{"type", "polynomial"}, {"a", s.a}, {"w", s.w}, {"p", s.p}};
  }
  json out = {{"type", "constant"}, {"reference", reference_name(s.reference)}};
  if (s.alpha) out["alpha"] = *s.alpha;
  if (s.alpha_multiple) out["alpha_multiple"] = *s.alpha_multiple;
  return out;
}

}  // namespace

MixingSpec parse_mixing_spec(const json& doc) {
  const std::string where = "mixing";
  if (!doc.is_object()) config_error(where, "expected an object");
  const std::string type = doc.contains("type") ? get<std::string>(doc, "type", where) : "explicit";
  if (type == "explicit") {
    check_keys(doc, where, {"type", "W"});
    return ExplicitMixingSpec{get<std::vector<std::vector<double>>>(doc, "W", where)};
  }
  if (type == "metropolis") {
    check_keys(doc, where, {"type", "adjacency"});
    return MetropolisMixingSpec{get<std::vector<std::vector<int>>>(doc, "adjacency", where)};
  }
  config_error(where, "unknown mixing type '" + type + "'");
}

json mixing_spec_json(const MixingSpec& spec) {
  if (const auto* e = std::get_if<ExplicitMixingSpec>(&spec)) return {{"type", "explicit"}, {"W", e->w}};
  const auto& m = std::get<MetropolisMixingSpec>(spec);
  return {{"type", "metropolis"}, {"adjacency", m.adjacency}};
}

ExperimentConfig parse_config(const json& doc) {
  const std::string where = "config";
  check_keys(doc, where,
             {"ensemble", "mixing", "schedule", "horizon", "record_every", "divergence_threshold", "agent_scale",
              "x0", "alpha_search", "eta_source", "radius_alpha0", "sweep"});
  ExperimentConfig c;
  if (!doc.contains("ensemble")) config_error(where, "missing key 'ensemble'");
  if (!doc.contains("mixing")) config_error(where, "missing key 'mixing'");
  c.ensemble = parse_ensemble(doc.at("ensemble"));
  c.mixing = parse_mixing_spec(doc.at("mixing"));
  if (doc.contains("schedule")) {
    c.schedule = parse_schedule(doc.at("schedule"));
  } else {
    c.schedule.alpha_multiple = 0.5;
  }
  c.horizon = get_or<std::int64_t>(doc, "horizon", c.horizon, where);
  if (c.horizon < 1) config_error(where, "horizon must be >= 1");
  c.record_every = get_or<std::int64_t>(doc, "record_every", c.record_every, where);
  if (c.record_every < 1) config_error(where, "record_every must be >= 1");
  c.divergence_threshold = get_or<double>(doc, "divergence_threshold", c.divergence_threshold, where);
  if (!(c.divergence_threshold > 0.0)) config_error(where, "divergence_threshold must be positive");
  c.agent_scale = get_or<bool>(doc, "agent_scale", false, where);
  if (doc.contains("x0") && !doc.at("x0").is_null()) c.x0 = get<std::vector<double>>(doc, "x0", where);
  if (doc.contains("radius_alpha0") && !doc.at("radius_alpha0").is_null())
    c.radius_alpha0 = get<double>(doc, "radius_alpha0", where);
  if (doc.contains("eta_source")) c.eta_source = parse_eta_source(get<std::string>(doc, "eta_source", where));

  if (doc.contains("alpha_search")) {
    const json& s = doc.at("alpha_search");
    const std::string w = "alpha_search";
    check_keys(s, w, {"method", "resolution", "grid_N", "scan_cap"});
    if (s.contains("method")) c.alpha_search.method = parse_search_method(get<std::string>(s, "method", w));
    c.alpha_search.resolution = get_or<double>(s, "resolution", c.alpha_search.resolution, w);
    c.alpha_search.grid_n = get_or<long>(s, "grid_N", c.alpha_search.grid_n, w);
    c.alpha_search.scan_cap = get_or<double>(s, "scan_cap", c.alpha_search.scan_cap, w);
    if (!(c.alpha_search.resolution > 0.0)) config_error(w, "resolution must be positive");
    if (c.alpha_search.grid_n < 1) config_error(w, "grid_N must be >= 1");
    if (!(c.alpha_search.scan_cap > 0.0)) config_error(w, "scan_cap must be positive");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    const std::string w = "sweep";
    check_keys(s, w, {"alpha_multiples", "reference", "epsilons"});
    c.sweep.alpha_multiples = get_or<std::vector<double>>(s, "alpha_multiples", c.sweep.alpha_multiples, w);
    c.sweep.epsilons = get_or<std::vector<double>>(s, "epsilons", c.sweep.epsilons, w);
    c.sweep.reference = parse_reference(get_or<std::string>(s, "reference", "alpha_A", w), w);
  }
  for (double k : c.sweep.alpha_multiples) {
    if (!(k > 0.0)) config_error("sweep.alpha_multiples", "every multiple must be positive");
  }
  for (double e : c.sweep.epsilons) {
    if (!(e >= 0.0)) config_error("sweep.epsilons", "every epsilon must be >= 0");
  }
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json serialize_config(const ExperimentConfig& c) {
  json doc;
  doc["ensemble"] = ensemble_json(c.ensemble);
  doc["mixing"] = mixing_spec_json(c.mixing);
  doc["schedule"] = schedule_json(c.schedule);
  doc["horizon"] = c.horizon;
  doc["record_every"] = c.record_every;
  doc["divergence_threshold"] = c.divergence_threshold;
  doc["agent_scale"] = c.agent_scale;
  doc["x0"] = c.x0 ? json(*c.x0) : json(nullptr);
  doc["radius_alpha0"] = c.radius_alpha0 ? json(*c.radius_alpha0) : json(nullptr);
  doc["eta_source"] = to_string(c.eta_source);
  doc["alpha_search"] = {{"method", to_string(c.alpha_search.method)},
                         {"resolution", c.alpha_search.resolution},
                         {"grid_N", c.alpha_search.grid_n},
                         {"scan_cap", c.alpha_search.scan_cap}};
  doc["sweep"] = {{"alpha_multiples", c.sweep.alpha_multiples},
                  {"reference", reference_name(c.sweep.reference)},
                  {"epsilons", c.sweep.epsilons}};
  return doc;
}

QuadraticEnsemble build_ensemble(const EnsembleSpec& spec) {
  return std::visit(
      [](const auto& s) -> QuadraticEnsemble {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RandomEnsembleSpec>) {
          return random_ensemble(s.m, s.n, s.epsilon, s.seed);
        } else if constexpr (std::is_same_v<T, EpsilonExampleSpec>) {
          return epsilon_example(s.big_l, s.mu, s.epsilon);
        } else {
          std::vector<QuadraticCost> costs;
          for (const auto& c : s.costs) costs.emplace_back(SymMatrix::from_rows(c.a), c.b);
          return QuadraticEnsemble(std::move(costs));
        }
      },
      spec);
}

MixingMatrix build_mixing(const MixingSpec& spec) {
  if (const auto* e = std::get_if<ExplicitMixingSpec>(&spec)) return validate(e->w);
  return metropolis_weights(std::get<MetropolisMixingSpec>(spec).adjacency);
}

}  // namespace dgdlab
