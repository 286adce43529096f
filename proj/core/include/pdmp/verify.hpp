#ifndef PDMP_VERIFY_HPP
#define PDMP_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pdmp::verify {

// One verification check with its headline metric. `value` compares against
// `threshold` in the direction recorded in `detail`.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// KS distance between the regime-0 continuous-occupation marginal of a long
// run and the Beta(lambda, lambda+1) law.
CheckResult beta_invariant_law(double lambda, std::uint64_t seed, double horizon = 5e4,
                               double output_dt = 0.02, double h = 1e-3);

// Fixed-point algebra of the competing-fields example: field residual at the
// diagonal critical point and numerical-Jacobian eigenvalues at both critical
// points against their closed forms.
std::vector<CheckResult> radulescu_fixed_point_algebra(double alpha = 3.0);

// Almost-sure decay of the distance to the diagonal when the slow field
// dominates: least-squares slope of log(X_t - Y_t) against the theoretical
// bound (plus 0.1 slack) in >= 18 of 20 seeded runs.
CheckResult radulescu_transience(double alpha = 3.0, double lambda0 = 1.0,
                                 double lambda1 = 4.0, int seeds = 20,
                                 std::uint64_t master_seed = 2024, int threads = 0);

// Behavioural recurrence check: with rare switches away from the slow field
// the path visits the off-diagonal sink in >= 18 of 20 seeded runs.
CheckResult radulescu_recurrence(double alpha = 3.0, double lambda0 = 1.0,
                                 double lambda1 = 0.05, int seeds = 20,
                                 std::uint64_t master_seed = 2024, int threads = 0);

// Weak/strong verdicts on the catalog: torus d=2,3 (weak at order 0, strong
// never), rotation example (strong at order 1 everywhere), segment example
// (strong never).
std::vector<CheckResult> bracket_verdicts(int scan_points_2d = 5, int k_max = 4);

// Symbolic vs nested-central-difference Lie bracket on the competing fields.
CheckResult bracket_oracle_equivalence(std::uint64_t seed = 7, int points = 20);

// Accessible-set geometry: the segment [0, a] for the A = -I example and
// the diagonal segment [b, alpha] for the competing-fields example.
CheckResult accessible_segment(int resolution = 128, int starts = 32, int threads = 0);
CheckResult accessible_radulescu(int resolution = 128, int starts = 32, int threads = 0);

// Median correspondence gap |Pi_t f - tilde-Pi_{N_t} K-tilde f| at t = 1e4
// below 0.01 and below the median at t = 1e2, f(x) = x, over 20 seeds.
CheckResult correspondence_gap_decay(int seeds = 20, std::uint64_t master_seed = 5,
                                     int threads = 0);

// Thinning correctness: sojourn times aggregate phantom jumps to the right
// exponential law, and state-dependent rates reproduce the closed-form
// survival function.
std::vector<CheckResult> thinning_distribution(std::uint64_t seed = 11);

// Least-squares slope of ys against xs.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace pdmp::verify

#endif  // PDMP_VERIFY_HPP
