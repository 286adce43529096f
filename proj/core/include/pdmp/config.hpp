#ifndef PDMP_CONFIG_HPP
#define PDMP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/system.hpp"

namespace pdmp::config {

// Flat sectioned text config. Sections: [model], [simulation], [analysis],
// [output]. Values are numbers, booleans, bare words, or quoted strings
// (expressions and vectors must be quoted). Unknown keys are hard errors.
struct RunConfig {
  // [model]: either a named example with parameter overrides...
  std::string example;
  std::map<std::string, double> example_params;
  // ...or an inline model.
  int dimension = 0;
  int regimes = 0;
  double lambda_bar = 0.0;
  std::vector<double> box_lo, box_hi;
  std::vector<bool> wrap;
  std::map<std::pair<int, int>, std::string> field_exprs;  // (regime, component)
  std::map<std::pair<int, int>, std::string> rate_exprs;   // (from, to)

  // [simulation]
  std::optional<std::uint64_t> seed;  // mandatory for stochastic commands
  double horizon = 100.0;
  long n_steps = 0;
  double output_dt = 1e-2;
  long n_replicas = 1;
  std::vector<double> x0;
  int regime0 = 0;

  // [analysis]
  double step = 1e-3;       // RK4 step h
  int quad_order = 32;
  int k_max = 4;
  double rank_tol = 1e-8;
  int grid_resolution = 128;
  double tau = 0.0;
  int bins = 0;             // 0 -> dimension default
  int start_samples = 32;
  double burn_in = 0.0;
  int scan_points = 5;      // verdict-map lattice per axis
  std::string reach_mode = "reachable";  // reachable | accessible | omega

  // [output]
  std::string out_dir = "out";

  int threads = 0;  // 0 -> PDMP_THREADS or hardware default

  std::string raw_text;  // exact file content, embedded in the manifest
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Builds the switching system from the named example or the inline model.
SwitchingSystem build_system(const RunConfig& cfg);

// Initial state: configured x0/regime0, or the box centre by default.
Point initial_point(const RunConfig& cfg, const SwitchingSystem& sys);

}  // namespace pdmp::config

#endif  // PDMP_CONFIG_HPP
