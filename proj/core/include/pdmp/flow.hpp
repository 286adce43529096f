#ifndef PDMP_FLOW_HPP
#define PDMP_FLOW_HPP

#include <optional>
#include <span>
#include <vector>

#include "pdmp/system.hpp"

namespace pdmp::flow {

inline constexpr double kDefaultStep = 1e-3;

struct FlowResult {
  Point endpoint;
  std::optional<std::vector<double>> jacobian;  // row-major d x d
  long steps = 0;
  long clamp_events = 0;
};

// Classical fixed-step RK4 for x' = F^i(x); a final partial step lands
// exactly on t. Steps leaving the box by more than `clamp_margin` are clamped
// back and counted; wrapped axes are folded after every step.
FlowResult integrate(const SwitchingSystem& sys, int regime, std::span<const double> x0,
                     double t, double h = kDefaultStep, double clamp_margin = 1e-6);

// Iterated integrate along a jump sequence; returns the endpoint and all
// intermediate points x_0..x_n.
struct CompositeResult {
  Point endpoint;
  std::vector<Point> points;  // n+1 entries, points[0] = x0
  long clamp_events = 0;
};
CompositeResult composite_flow(const SwitchingSystem& sys, std::span<const double> x0,
                               const JumpSequence& seq, double h = kDefaultStep);

// Integrates the variational equation J' = DF^i(x(t)) J, J(0) = I alongside
// the state; throws SingularJacobian when |det J| < 1e-12.
FlowResult variational_integrate(const SwitchingSystem& sys, int regime,
                                 std::span<const double> x0, double t,
                                 double h = kDefaultStep);

// Reusable single-step RK4 driver; owns the scratch buffers so tight loops
// (reachability expansion, test oracles) avoid per-step allocation.
class Stepper {
 public:
  explicit Stepper(const SwitchingSystem& sys);

  // One RK4 step of size h in the given regime; wraps torus axes.
  void step(int regime, std::span<double> x, double h);

 private:
  const SwitchingSystem* sys_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, scratch_;
};

enum class PullbackVariant { tilde, difference };

// Family of pulled-back field vectors at the base point. The tilde variant
// holds m+1 vectors F^{i_0}(x0), Phi*_(1) F^{i_1}(x0), ..., Phi*_(m) F^{i_m}(x0);
// the difference variant holds the m consecutive differences against the last
// pullback. Pullbacks chain inverse variational Jacobians via linear solves.
struct PullbackFamily {
  Point base;
  JumpSequence sequence;
  PullbackVariant variant = PullbackVariant::tilde;
  std::vector<Point> vectors;
};

PullbackFamily pullback_family(const SwitchingSystem& sys, std::span<const double> x0,
                               const JumpSequence& seq, PullbackVariant variant,
                               double h = kDefaultStep);

// Numerical rank of the family: singular values > tol * sigma_max.
struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;
};
RankResult submersion_rank(const PullbackFamily& family, double tol = 1e-8);
RankResult matrix_rank(const std::vector<Point>& columns, int dimension, double tol = 1e-8);

}  // namespace pdmp::flow

#endif  // PDMP_FLOW_HPP
