// dgdlab: stepsize bounds, alpha_A search and DGD runs from a JSON config.
//
// Exit codes: 0 success, 2 invalid config, 3 certification failure,
// 4 I/O failure, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dgdlab/config.hpp"
#include "dgdlab/error.hpp"
#include "dgdlab/experiments.hpp"
#include "dgdlab/report.hpp"

namespace fs = std::filesystem;
using namespace dgdlab;

namespace {

constexpr const char* kFooter = R"(Outputs (written under --out):
  simulate        trajectory.csv      t,alpha,R,consensus_err,dist_lifted_min
                  summary.json
  sweep-alpha     sweep_alpha.csv     alpha_multiple,t,R
                  sweep_alpha_summary.json
  sweep-epsilon   sweep_epsilon.csv   epsilon,alpha_A,alpha_L,alpha_S
                  sweep_epsilon_summary.json
  bounds          bounds.json (also printed)
dist_lifted_min is -1 when the lifted minimizer is not tracked; missing
sweep-epsilon values are empty fields.
Exit codes: 0 ok, 2 config, 3 certification, 4 I/O.
DGD_LAB_THREADS caps sweep parallelism.)";

struct Options {
  std::string config_path;
  std::string out_dir = "dgdlab_out";
  bool out_given = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  bool agent_scale = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::validation:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::asymmetric:
    case ErrorCode::not_stochastic:
    case ErrorCode::zero_diagonal:
    case ErrorCode::disconnected:
    case ErrorCode::invalid_schedule:
      return 2;
    case ErrorCode::not_strongly_convex:
    case ErrorCode::not_in_class:
    case ErrorCode::radius_undefined:
      return 3;
    case ErrorCode::io:
      return 4;
    default:
      return 1;
  }
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) {
    if (auto* r = std::get_if<RandomEnsembleSpec>(&c.ensemble)) r->seed = *o.seed;
  }
  if (o.horizon) {
    if (*o.horizon < 1) throw Error(ErrorCode::config, "--horizon must be >= 1");
    c.horizon = *o.horizon;
  }
  if (o.agent_scale) c.agent_scale = true;
  return c;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_file(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

int cmd_bounds(const Options& o) {
  const ExperimentConfig c = load(o);
  const LiftedObjective obj = build_problem(c);
  const nlohmann::json doc = to_json(compute_bounds(c, obj));
  std::cout << doc.dump(2) << '\n';
  if (o.out_given) write_json(ensure_dir(o.out_dir) / "bounds.json", doc);
  return 0;
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig c = load(o);
  const LiftedObjective obj = build_problem(c);
  const SimulationResult r = simulate(c, obj);
  const fs::path dir = ensure_dir(o.out_dir);
  write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, r.record); });
  const nlohmann::json summary = to_json(r);
  write_json(dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_sweep_alpha(const Options& o) {
  const ExperimentConfig c = load(o);
  const LiftedObjective obj = build_problem(c);
  const SweepAlphaResult r = sweep_alpha(c, obj);
  const fs::path dir = ensure_dir(o.out_dir);
  write_file(dir / "sweep_alpha.csv", [&](std::ostream& os) { write_sweep_alpha_csv(os, r); });
  const nlohmann::json summary = to_json(r);
  write_json(dir / "sweep_alpha_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_sweep_epsilon(const Options& o) {
  const ExperimentConfig c = load(o);
  build_problem(c);
  const auto rows = sweep_epsilon(c);
  const fs::path dir = ensure_dir(o.out_dir);
  write_file(dir / "sweep_epsilon.csv", [&](std::ostream& os) { write_sweep_epsilon_csv(os, rows); });
  const nlohmann::json summary = to_json(rows);
  write_json(dir / "sweep_epsilon_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_validate_topology(const Options& o) {
  const ExperimentConfig c = load(o);
  const MixingMatrix w = build_mixing(c.mixing);
  nlohmann::json doc = {{"valid", true}, {"m", w.agents()}, {"spectral", to_json(w.spectral())}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized gradient descent stepsize laboratory"};
  app.footer(kFooter);
  app.require_subcommand(1);

  Options o;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->required();
    sub->add_option("--out", o.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the random ensemble seed");
    sub->add_option("--horizon", horizon, "Override the iteration horizon T");
    sub->add_flag("--agent-scale", o.agent_scale, "Use the per-agent stepsize alpha instead of alpha/m");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Command commands[] = {
      {"bounds", "Print every stepsize bound as JSON", cmd_bounds},
      {"simulate", "Run one DGD trajectory", cmd_simulate},
      {"sweep-alpha", "Run constant stepsizes at multiples of alpha_A", cmd_sweep_alpha},
      {"sweep-epsilon", "Compute alpha_A against epsilon", cmd_sweep_epsilon},
      {"validate-topology", "Validate the mixing matrix and print its spectrum", cmd_validate_topology},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub);
    subs.emplace_back(sub, &cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--horizon")) o.horizon = horizon;
    o.out_given = sub->count("--out") > 0;
    try {
      return cmd->fn(o);
    } catch (const Error& e) {
      std::cerr << "dgdlab: " << to_string(e.code()) << ": " << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      std::cerr << "dgdlab: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
