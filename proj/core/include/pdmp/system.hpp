#ifndef PDMP_SYSTEM_HPP
#define PDMP_SYSTEM_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdmp/errors.hpp"
#include "pdmp/expr.hpp"

namespace pdmp {

using Point = std::vector<double>;

// Axis-aligned state box M, optionally wrapped (torus) per axis.
struct Box {
  std::vector<double> lo, hi;
  std::vector<bool> wrap;  // empty means no wrapping anywhere

  int dimension() const { return static_cast<int>(lo.size()); }
  double extent(int k) const { return hi[k] - lo[k]; }

  bool wraps(int k) const { return !wrap.empty() && wrap[static_cast<std::size_t>(k)]; }

  bool contains(std::span<const double> x, double margin = 0.0) const;

  // Wraps wrapped axes into [lo, hi); leaves other axes untouched.
  void wrap_point(std::span<double> x) const;

  // Deterministic probe grid: `per_axis` points per axis (capped at
  // `max_points` total) plus the box corners.
  std::vector<Point> probe_grid(int per_axis = 16, std::size_t max_points = 65536) const;
};

// A vector field on R^d. Either expression-backed (components parsed from
// strings, exact symbolic Jacobian) or programmatic (callable components with
// optional callable Jacobian; central differences otherwise).
class VectorField {
 public:
  using Callable = std::function<void(std::span<const double>, std::span<double>)>;
  using JacobianCallable =
      std::function<void(std::span<const double>, std::span<double>)>;  // row-major d*d

  VectorField() = default;
  VectorField(std::vector<expr::Expression> components);
  VectorField(int dimension, Callable f, JacobianCallable jac = nullptr);

  int dimension() const { return dim_; }
  bool symbolic() const { return !components_.empty(); }
  const std::vector<expr::Expression>& components() const { return components_; }

  // f(x) -> out (length d). `scratch` must hold at least scratch_need() slots.
  void value(std::span<const double> x, std::span<double> out, double* scratch) const;
  std::size_t scratch_need() const { return scratch_need_; }

  Point value(std::span<const double> x) const;

  // Jacobian, row-major: out[i*d + j] = dF_i/dx_j. Symbolic when available,
  // otherwise central differences with step 1e-5 * (1 + |x|).
  void jacobian(std::span<const double> x, std::span<double> out) const;

  // dF_i/dx_j as an expression; only for symbolic fields.
  const expr::Expression& partial(int i, int j) const;

 private:
  int dim_ = 0;
  std::vector<expr::Expression> components_;
  std::vector<expr::Expression> partials_;  // row-major, symbolic only
  Callable callable_;
  JacobianCallable jac_callable_;
  std::size_t scratch_need_ = 0;
};

// Jump sequence (i_0..i_n, u_1..u_n): n+1 regime indices, n durations.
struct JumpSequence {
  std::vector<int> indices;
  std::vector<double> durations;

  int legs() const { return static_cast<int>(durations.size()); }
  void check() const;
};

struct Violation {
  std::string message;
  Point at;  // offending probe point, empty when not point-specific
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// The switching system: regime vector fields F^i, jump rates lambda(x,i,j),
// uniformization constant lambda_bar, and the (assumed invariant) box M.
class SwitchingSystem {
 public:
  SwitchingSystem(int dimension, int regimes, std::vector<VectorField> fields,
                  std::vector<expr::Expression> rates,  // row-major regimes x regimes
                  double lambda_bar, Box box);

  int dimension() const { return dim_; }
  int regimes() const { return regimes_; }
  double lambda_bar() const { return lambda_bar_; }
  const Box& box() const { return box_; }
  const VectorField& field(int i) const { return fields_[static_cast<std::size_t>(i)]; }
  double speed_bound() const { return speed_bound_; }

  double rate(std::span<const double> x, int i, int j) const;

  // Row-stochastic thinning matrix Q(x), row-major regimes x regimes.
  // Q(x,i,j) = rate(x,i,j)/lambda_bar off-diagonal; diagonal fills the row.
  std::vector<double> q_matrix(std::span<const double> x) const;

  // Probe-grid checks of the model invariants (rates nonnegative and zero on
  // the diagonal, strict row-sum bound, irreducibility, finite fields and
  // first derivatives, finite speed bound).
  ValidationReport validate() const;

  // Suggested uniformization constant: 1.2 x max probe-grid rate row sum.
  double suggest_lambda_bar() const;

  const std::vector<Point>& probe_points() const { return probes_; }

 private:
  int dim_;
  int regimes_;
  std::vector<VectorField> fields_;
  std::vector<expr::Expression> rates_;
  double lambda_bar_;
  Box box_;
  std::vector<Point> probes_;
  double speed_bound_ = 0.0;
};

// Product of Q entries along the composite trajectory of `seq` started at x;
// positive iff the sequence is adapted to x. Positions are computed with the
// flow integrator at step h.
double adapted_weight(const SwitchingSystem& sys, std::span<const double> x,
                      const JumpSequence& seq, double h);

}  // namespace pdmp

#endif  // PDMP_SYSTEM_HPP
