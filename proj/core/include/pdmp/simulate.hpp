#ifndef PDMP_SIMULATE_HPP
#define PDMP_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pdmp/flow.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/system.hpp"

namespace pdmp::sim {

struct State {
  Point x;
  int regime = 0;
};

// One proposal of the thinning construction: holding time, next position and
// regime. Phantom proposals keep the regime.
struct SkeletonEntry {
  double time = 0.0;       // T_n
  double interarrival = 0.0;  // U_n (0 for the initial entry)
  Point position;          // post-jump position \tilde X_n
  int regime = 0;          // \tilde Y_n
  bool true_switch = false;  // regime changed at this proposal
};

struct DenseSample {
  double t = 0.0;
  Point x;
  int regime = 0;     // regime in effect on [t, next sample)
  bool at_jump = false;
  bool at_true_switch = false;
};

// A sampled trajectory: the embedded skeleton (proposal times, including
// phantom jumps) and, optionally, dense samples on a uniform output grid
// augmented with the jump times.
struct HybridPath {
  std::vector<SkeletonEntry> skeleton;  // skeleton[0] is the initial state
  std::vector<DenseSample> dense;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  long clamp_events = 0;

  // Number of proposals with T_k <= t, k >= 1.
  std::size_t jumps_up_to(double t) const;
};

struct SimOptions {
  double step = flow::kDefaultStep;  // RK4 step h
  double output_dt = 1e-2;           // dense output grid
  bool record_dense = true;
};

// One step of the embedded chain from (x, i): draws U ~ Exp(lambda_bar),
// flows regime i for U, then samples the next regime from the Q row at the
// landing point. Consumes exactly one exponential and one uniform draw.
struct StepResult {
  State state;
  double interarrival = 0.0;
  bool true_switch = false;
  long clamp_events = 0;
};
StepResult embedded_step(const SwitchingSystem& sys, const State& from, Rng& rng,
                         double h = flow::kDefaultStep);

// Jump skeleton of n_steps proposals (no dense samples).
HybridPath sample_embedded(const SwitchingSystem& sys, const State& z0, long n_steps,
                           Rng& rng, double h = flow::kDefaultStep);

// Full path to the horizon with dense samples at t = k * output_dt plus all
// jump times. The skeleton is computed exactly as sample_embedded would.
HybridPath sample_path(const SwitchingSystem& sys, const State& z0, double horizon,
                       const SimOptions& opt, Rng& rng);

// Runs n_replicas independent replicas with RNG streams derived from
// master_seed (stream k = replica k); results are indexed by replica and do
// not depend on scheduling. `threads` <= 0 picks the hardware default.
template <class T>
std::vector<T> ensemble(long n_replicas, std::uint64_t master_seed,
                        const std::function<T(long, Rng&)>& replica_op, int threads = 0);

// Implementation of the ensemble scheduler (type-erased).
void run_ensemble(long n_replicas, std::uint64_t master_seed,
                  const std::function<void(long, Rng&)>& op, int threads);

template <class T>
std::vector<T> ensemble(long n_replicas, std::uint64_t master_seed,
                        const std::function<T(long, Rng&)>& replica_op, int threads) {
  std::vector<T> results(static_cast<std::size_t>(n_replicas));
  run_ensemble(
      n_replicas, master_seed,
      [&](long k, Rng& rng) { results[static_cast<std::size_t>(k)] = replica_op(k, rng); },
      threads);
  return results;
}

}  // namespace pdmp::sim

#endif  // PDMP_SIMULATE_HPP
