#ifndef PDMP_EXAMPLES_HPP
#define PDMP_EXAMPLES_HPP

#include <array>
#include <map>
#include <string>

#include "pdmp/system.hpp"

namespace pdmp::examples {

// Constant unit translation fields on the d-torus [0,1)^d, one per regime.
// Constant rates 1 between all regimes, lambda_bar = d + 1.
SwitchingSystem torus(int d);

// F0(x) = A x, F1(x) = A (x - a) on a square box of half-width 3 (|a| + 1);
// constant rates lambda0 (0 -> 1) and lambda1 (1 -> 0).
struct PlanarLinear {
  SwitchingSystem system;
  std::array<double, 4> A;  // row-major
  std::array<double, 2> a;
  double lambda0 = 0.0, lambda1 = 0.0;

  // det(F0(x), F1(x)) = det(A) det(a, x) identically.
  double det_identity_lhs(std::span<const double> x) const;
  double det_identity_rhs(std::span<const double> x) const;
};
PlanarLinear planar_linear(const std::array<double, 4>& A, const std::array<double, 2>& a,
                           double lambda0 = 1.0, double lambda1 = 1.0);

// The rotation example: A = [[-1,-1],[1,-1]] (eigenvalues -1 +- i), a = (1,0).
PlanarLinear planar_linear_rotation(double lambda0 = 1.0, double lambda1 = 1.0);
// The degenerate example: A = -I, a = (1,0); the segment [0, a] absorbs.
PlanarLinear planar_linear_segment(double lambda0 = 1.0, double lambda1 = 1.0);

// 1-d two-flow system on [0,1]: F0 = -x, F1 = 1 - x, both rates lambda,
// lambda_bar = 2 lambda + 1. The invariant marginals are Beta laws:
// regime 0 ~ Beta(lambda, lambda+1), regime 1 ~ Beta(lambda+1, lambda).
struct IntervalBeta {
  SwitchingSystem system;
  double lambda = 1.0;
  double cdf0(double x) const;  // Beta(lambda, lambda+1)
  double cdf1(double x) const;  // Beta(lambda+1, lambda)
  double pdf0(double x) const;
  double mean0() const;  // lambda / (2 lambda + 1)
};
IntervalBeta interval_beta(double lambda);

// Two competing planar fields with cubic critical-point structure:
// F0 = (alpha - x, alpha - y), F1 = (alpha/(1+y^2) - x, alpha/(1+x^2) - y),
// constant rates lambda0, lambda1, box [0, alpha+1]^2.
struct Radulescu {
  SwitchingSystem system;
  double alpha = 3.0, lambda0 = 1.0, lambda1 = 1.0;

  double b_newton() const;       // root of b^3 + b = alpha by Newton
  double b_closed_form() const;  // Cardano closed form of the same root
  double a_plus() const;         // (alpha + sqrt(alpha^2 - 4)) / 2, alpha > 2

  // Eigenvalues of DF1 at the diagonal critical point (b, b).
  double eta1() const;  // -3 + 2 b / alpha
  double eta2() const;  //  1 - 2 b / alpha

  // Eigenvalues of DF1 at (a, 1/a) for alpha > 2: -1 +- 2/alpha.
  std::array<double, 2> sink_eigenvalues() const;

  static constexpr double kC = 0.6495190528383290;  // 3 sqrt(3) / 8

  // Almost-sure decay bound of log(X_t - Y_t) in the wedge below the
  // diagonal: -(lambda1 - (c alpha - 1) lambda0) / (lambda0 + lambda1).
  double wedge_decay_bound() const;
};
Radulescu radulescu(double alpha, double lambda0 = 1.0, double lambda1 = 1.0);

// The same dynamics in mean / half-difference coordinates u = (x+y)/2,
// v = (x-y)/2. v evolves multiplicatively, so the distance to the diagonal
// stays resolvable long after x - y would vanish in double precision.
Radulescu radulescu_diag(double alpha, double lambda0 = 1.0, double lambda1 = 1.0);

// Factory by name with numeric parameter overrides (CLI entry point).
// Names: torus, planar_linear, planar_linear_segment, interval_beta,
// radulescu, radulescu_diag.
SwitchingSystem by_name(const std::string& name, const std::map<std::string, double>& params);
std::vector<std::string> catalog();

}  // namespace pdmp::examples

#endif  // PDMP_EXAMPLES_HPP
