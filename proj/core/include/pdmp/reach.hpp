#ifndef PDMP_REACH_HPP
#define PDMP_REACH_HPP

#include <cstdint>
#include <vector>

#include "pdmp/system.hpp"

namespace pdmp::reach {

struct ReachOptions {
  int resolution = 128;    // cells per axis
  double tau = 0.0;        // micro step; 0 picks 0.5 * cell / C_sp
  long max_iters = 0;      // BFS rounds; 0 picks 10 * resolution
  long micro_steps = 4096;  // step budget per cell visit and regime
  long stall_steps = 1024;  // give up a visit when no new cell appears
  int threads = 0;         // parallel starts in accessible_set
};

// Boolean occupancy grid over the box, with earliest arrival times.
struct ReachGrid {
  Box box;
  int resolution = 0;
  std::vector<std::uint8_t> occupied;  // row-major cells
  std::vector<double> arrival;         // flow time of first occupation (inf if never)
  double tau = 0.0;
  long rounds = 0;
  std::vector<Point> starts;

  std::size_t cell_count() const;
  std::size_t cell_of(std::span<const double> x) const;
  Point center_of(std::size_t cell) const;
  double cell_width(int axis) const;
  std::size_t occupied_count() const;

  // Chebyshev dilation by `cells`; approximates the closure of the underlying
  // set at grid scale.
  ReachGrid dilated(int cells = 1) const;
};

// Grid approximation of the closed positive orbit of x0 under bang-bang
// regime switching: BFS over cells, expanding each frontier cell with every
// regime's flow in micro steps of tau and marking the cells crossed.
ReachGrid reachable(const SwitchingSystem& sys, std::span<const double> x0,
                    const ReachOptions& opt = {});

// Multi-source variant (shared by omega_limit).
ReachGrid reachable_multi(const SwitchingSystem& sys, const std::vector<Point>& starts,
                          const ReachOptions& opt = {});

// Approximates the accessible set by intersecting the 1-cell dilations of the
// per-start reach grids over a deterministic (Halton) sample of start points.
// The dilation stands in for the closure of each positive orbit; without it,
// sets meeting only along a boundary would intersect to nothing at any
// resolution.
ReachGrid accessible_set(const SwitchingSystem& sys, int start_samples = 32,
                         const ReachOptions& opt = {});
ReachGrid accessible_set(const SwitchingSystem& sys, const std::vector<Point>& starts,
                         const ReachOptions& opt = {});

// Omega-limit approximation: reachable set restarted from the cells first
// reached after burn_in_time (falls back to the latest-reached cells when the
// expansion never runs that long).
ReachGrid omega_limit(const SwitchingSystem& sys, std::span<const double> x0,
                      double burn_in_time, const ReachOptions& opt = {});

// Deterministic Halton sample of the box interior.
std::vector<Point> halton_sample(const Box& box, int count);

}  // namespace pdmp::reach

#endif  // PDMP_REACH_HPP
