// Command-line front end: validate / simulate / occupation / brackets /
// reach / verify over a flat sectioned config file.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "pdmp/config.hpp"
#include "pdmp/examples.hpp"
#include "pdmp/io.hpp"
#include "pdmp/measure.hpp"
#include "pdmp/reach.hpp"
#include "pdmp/simulate.hpp"
#include "pdmp/verify.hpp"

namespace {

using nlohmann::json;
using namespace pdmp;

constexpr const char* kVersion = "0.1.0";

int resolve_threads(int cli_threads, const config::RunConfig* cfg) {
  if (cli_threads > 0) return cli_threads;
  if (cfg && cfg->threads > 0) return cfg->threads;
  if (const char* env = std::getenv("PDMP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

std::string out_path(const config::RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_manifest(const config::RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "pdmp";
  m["version"] = kVersion;
  m["command"] = command;
  m["config_hash"] = io::hex64(io::fnv1a(cfg.raw_text));
  m["config"] = cfg.raw_text;
  if (cfg.seed) m["seed"] = *cfg.seed;
  m["outputs"] = outputs;
  io::atomic_write(out_path(cfg, "manifest.json"), m.dump(2) + "\n");
}

void write_error_json(const std::string& dir, const std::string& message, int code) {
  try {
    json e;
    e["error"] = message;
    e["exit_code"] = code;
    io::atomic_write((std::filesystem::path(dir) / "error.json").string(), e.dump(2) + "\n");
  } catch (...) {
    // stderr already carries the message
  }
}

std::uint64_t require_seed(const config::RunConfig& cfg) {
  if (!cfg.seed)
    throw ConfigError("simulation.seed is mandatory (no wall-clock default)");
  return *cfg.seed;
}

int cmd_validate(const config::RunConfig& cfg) {
  auto sys = config::build_system(cfg);
  auto report = sys.validate();
  std::cout << report.summary() << "\n";
  json j;
  j["valid"] = report.ok();
  j["violations"] = json::array();
  for (const auto& v : report.violations) {
    json vj;
    vj["message"] = v.message;
    vj["at"] = v.at;
    j["violations"].push_back(vj);
  }
  j["speed_bound"] = sys.speed_bound();
  j["suggested_lambda_bar"] = sys.suggest_lambda_bar();
  io::atomic_write(out_path(cfg, "validate.json"), j.dump(2) + "\n");
  write_manifest(cfg, "validate", {"validate.json"});
  return report.ok() ? 0 : 1;
}

int cmd_simulate(const config::RunConfig& cfg, int threads) {
  auto sys = config::build_system(cfg);
  auto report = sys.validate();
  if (!report.ok()) {
    std::cerr << report.summary() << "\n";
    return 1;
  }
  const auto seed = require_seed(cfg);
  const Point x0 = config::initial_point(cfg, sys);

  sim::SimOptions opt;
  opt.step = cfg.step;
  opt.output_dt = cfg.output_dt;

  auto paths = sim::ensemble<sim::HybridPath>(
      cfg.n_replicas, seed,
      [&](long k, Rng& rng) {
        sim::HybridPath p =
            cfg.n_steps > 0
                ? sim::sample_embedded(sys, {x0, cfg.regime0}, cfg.n_steps, rng, cfg.step)
                : sim::sample_path(sys, {x0, cfg.regime0}, cfg.horizon, opt, rng);
        p.seed = seed + static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ULL;
        return p;
      },
      threads);

  std::vector<std::string> outputs;
  for (long k = 0; k < cfg.n_replicas; ++k) {
    const auto& p = paths[static_cast<std::size_t>(k)];
    const std::string base = "replica_" + std::to_string(k);
    if (!p.dense.empty()) {
      io::atomic_write(out_path(cfg, base + "_path.csv"), io::path_csv(p, sys.dimension()));
      outputs.push_back(base + "_path.csv");
    }
    io::atomic_write(out_path(cfg, base + "_skeleton.json"),
                     io::skeleton_json(p, sys.dimension()));
    outputs.push_back(base + "_skeleton.json");
  }
  write_manifest(cfg, "simulate", outputs);
  return 0;
}

int cmd_occupation(const config::RunConfig& cfg, int threads) {
  (void)threads;
  auto sys = config::build_system(cfg);
  auto report = sys.validate();
  if (!report.ok()) {
    std::cerr << report.summary() << "\n";
    return 1;
  }
  const auto seed = require_seed(cfg);
  const Point x0 = config::initial_point(cfg, sys);

  sim::SimOptions opt;
  opt.step = cfg.step;
  opt.output_dt = cfg.output_dt;
  Rng rng(seed);
  auto path = sim::sample_path(sys, {x0, cfg.regime0}, cfg.horizon, opt, rng);
  path.seed = seed;

  auto cont = measure::continuous_occupation(path, cfg.horizon);
  const std::size_t n_jumps = path.jumps_up_to(cfg.horizon);
  auto disc = measure::discrete_occupation(path, std::max<std::size_t>(1, n_jumps));

  const int bins = cfg.bins > 0 ? cfg.bins : measure::default_bins(sys.dimension());
  auto hist = measure::histogram(cont, sys.box(), sys.regimes(), bins);

  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  const double t_small = std::max(1.0, cfg.horizon / 100.0);
  json gap;
  gap["f"] = "x1";
  gap["t_large"] = cfg.horizon;
  gap["gap_large"] =
      measure::correspondence_gap(sys, path, f, cfg.horizon, cfg.quad_order, cfg.step);
  gap["t_small"] = t_small;
  gap["gap_small"] =
      measure::correspondence_gap(sys, path, f, t_small, cfg.quad_order, cfg.step);

  io::atomic_write(out_path(cfg, "occupation_continuous.csv"),
                   io::measure_csv(cont, sys.dimension()));
  io::atomic_write(out_path(cfg, "occupation_discrete.csv"),
                   io::measure_csv(disc, sys.dimension()));
  io::atomic_write(out_path(cfg, "histogram.csv"), io::histogram_csv(hist));
  io::atomic_write(out_path(cfg, "correspondence_gap.json"), gap.dump(2) + "\n");
  write_manifest(cfg, "occupation",
                 {"occupation_continuous.csv", "occupation_discrete.csv", "histogram.csv",
                  "correspondence_gap.json"});
  return 0;
}

int cmd_brackets(const config::RunConfig& cfg) {
  auto sys = config::build_system(cfg);
  std::vector<brackets::VerdictRow> rows;
  for (auto kind : {brackets::ConditionKind::weak, brackets::ConditionKind::strong}) {
    auto part = brackets::region_scan(sys, kind, cfg.scan_points, cfg.k_max, cfg.rank_tol);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  io::atomic_write(out_path(cfg, "verdicts.csv"), io::verdicts_csv(rows, sys.dimension()));
  write_manifest(cfg, "brackets", {"verdicts.csv"});
  return 0;
}

int cmd_reach(const config::RunConfig& cfg, int threads) {
  auto sys = config::build_system(cfg);
  auto report = sys.validate();
  if (!report.ok()) {
    std::cerr << report.summary() << "\n";
    return 1;
  }
  reach::ReachOptions opt;
  opt.resolution = cfg.grid_resolution;
  opt.tau = cfg.tau;
  opt.threads = threads;

  reach::ReachGrid grid;
  if (cfg.reach_mode == "accessible") {
    grid = reach::accessible_set(sys, cfg.start_samples, opt);
  } else if (cfg.reach_mode == "omega") {
    grid = reach::omega_limit(sys, config::initial_point(cfg, sys), cfg.burn_in, opt);
  } else {
    grid = reach::reachable(sys, config::initial_point(cfg, sys), opt);
  }

  std::vector<std::string> outputs{"reach.csv"};
  io::atomic_write(out_path(cfg, "reach.csv"), io::grid_csv(grid));
  if (sys.dimension() == 2) {
    io::atomic_write(out_path(cfg, "reach.pgm"), io::grid_pgm(grid));
    outputs.push_back("reach.pgm");
  }
  write_manifest(cfg, "reach", outputs);
  return 0;
}

int cmd_verify(const std::string& example, double lambda, double alpha, std::uint64_t seed,
               double horizon, const std::string& out_dir, int threads) {
  std::vector<verify::CheckResult> checks;
  if (example == "interval_beta") {
    checks.push_back(verify::beta_invariant_law(lambda, seed, horizon));
  } else if (example == "radulescu") {
    checks = verify::radulescu_fixed_point_algebra(alpha);
  } else if (example == "torus" || example == "planar_linear" ||
             example == "planar_linear_segment") {
    for (auto& c : verify::bracket_verdicts())
      if ((example == "torus" && c.name.rfind("torus", 0) == 0) ||
          (example == "planar_linear" && c.name.rfind("rotation", 0) == 0) ||
          (example == "planar_linear_segment" && c.name.rfind("segment", 0) == 0))
        checks.push_back(std::move(c));
  } else if (example == "thinning") {
    checks = verify::thinning_distribution(seed);
  } else {
    throw ConfigError("verify: unknown target '" + example +
                      "' (try interval_beta, radulescu, torus, planar_linear, "
                      "planar_linear_segment, thinning)");
  }
  (void)threads;

  bool all = true;
  json j;
  j["target"] = example;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["value"] = c.value;
    cj["threshold"] = c.threshold;
    cj["detail"] = c.detail;
    j["checks"].push_back(cj);
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  j["pass"] = all;
  io::atomic_write((std::filesystem::path(out_dir) / "verify.json").string(),
                   j.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching piecewise deterministic Markov process toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  int cli_threads = 0;

  auto add_config_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("-c,--config", config_path, "config file")->required();
    cmd->add_option("--threads", cli_threads, "worker thread cap");
    return cmd;
  };

  auto* validate = add_config_cmd("validate", "check model invariants on the probe grid");
  auto* simulate = add_config_cmd("simulate", "sample paths, write CSV/JSON");
  auto* occupation = add_config_cmd("occupation", "occupation measures and histograms");
  auto* brackets_cmd = add_config_cmd("brackets", "weak/strong bracket verdict map");
  auto* reach_cmd = add_config_cmd("reach", "grid reachability / accessible set");

  std::string verify_target;
  double verify_lambda = 2.0, verify_alpha = 3.0;
  std::uint64_t verify_seed = 42;
  double verify_horizon = 5e4;
  std::string verify_out = "out";
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run an example's built-in acceptance checks");
  verify_cmd->add_option("target", verify_target, "example name")->required();
  verify_cmd->add_option("--lambda", verify_lambda, "rate parameter");
  verify_cmd->add_option("--alpha", verify_alpha, "alpha parameter");
  verify_cmd->add_option("--seed", verify_seed, "RNG seed");
  verify_cmd->add_option("--horizon", verify_horizon, "simulation horizon");
  verify_cmd->add_option("-o,--out", verify_out, "output directory");
  verify_cmd->add_option("--threads", cli_threads, "worker thread cap");

  CLI11_PARSE(app, argc, argv);

  std::string out_dir = "out";
  try {
    if (verify_cmd->parsed()) {
      out_dir = verify_out;
      return cmd_verify(verify_target, verify_lambda, verify_alpha, verify_seed,
                        verify_horizon, verify_out, resolve_threads(cli_threads, nullptr));
    }
    auto cfg = config::load_config(config_path);
    out_dir = cfg.out_dir;
    const int threads = resolve_threads(cli_threads, &cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg, threads);
    if (occupation->parsed()) return cmd_occupation(cfg, threads);
    if (brackets_cmd->parsed()) return cmd_brackets(cfg);
    if (reach_cmd->parsed()) return cmd_reach(cfg, threads);
  } catch (const InvariantViolation& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    write_error_json(out_dir, e.what(), 1);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_error_json(out_dir, e.what(), 2);
    return 2;
  }
  return 0;
}
