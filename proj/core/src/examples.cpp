#include "pdmp/examples.hpp"

#include <cmath>
#include <sstream>

#include "pdmp/special.hpp"

namespace pdmp::examples {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<expr::Expression> constant_rates(int regimes, int d,
                                             const std::vector<double>& rate_of_pair) {
  // rate_of_pair is row-major with zero diagonal.
  std::vector<expr::Expression> rates;
  rates.reserve(static_cast<std::size_t>(regimes * regimes));
  for (int i = 0; i < regimes; ++i)
    for (int j = 0; j < regimes; ++j)
      rates.push_back(expr::constant(rate_of_pair[static_cast<std::size_t>(i * regimes + j)], d));
  return rates;
}

std::vector<expr::Expression> symmetric_two_rates(double lambda01, double lambda10, int d) {
  return constant_rates(2, d, {0.0, lambda01, lambda10, 0.0});
}

}  // namespace

SwitchingSystem torus(int d) {
  if (d < 2) throw DomainError("torus example needs d >= 2");
  std::vector<VectorField> fields;
  for (int i = 0; i < d; ++i) {
    std::vector<expr::Expression> comps;
    for (int c = 0; c < d; ++c) comps.push_back(expr::constant(c == i ? 1.0 : 0.0, d));
    fields.emplace_back(std::move(comps));
  }
  std::vector<double> rate_table(static_cast<std::size_t>(d * d), 1.0);
  for (int i = 0; i < d; ++i) rate_table[static_cast<std::size_t>(i * d + i)] = 0.0;

  Box box;
  box.lo.assign(static_cast<std::size_t>(d), 0.0);
  box.hi.assign(static_cast<std::size_t>(d), 1.0);
  box.wrap.assign(static_cast<std::size_t>(d), true);

  return SwitchingSystem(d, d, std::move(fields), constant_rates(d, d, rate_table),
                         static_cast<double>(d) + 1.0, std::move(box));
}

PlanarLinear planar_linear(const std::array<double, 4>& A, const std::array<double, 2>& a,
                           double lambda0, double lambda1) {
  const int d = 2;
  auto field0 = VectorField({
      expr::parse(fmt(A[0]) + "*x1 + " + fmt(A[1]) + "*x2", d),
      expr::parse(fmt(A[2]) + "*x1 + " + fmt(A[3]) + "*x2", d),
  });
  auto field1 = VectorField({
      expr::parse(fmt(A[0]) + "*(x1 - " + fmt(a[0]) + ") + " + fmt(A[1]) + "*(x2 - " +
                      fmt(a[1]) + ")",
                  d),
      expr::parse(fmt(A[2]) + "*(x1 - " + fmt(a[0]) + ") + " + fmt(A[3]) + "*(x2 - " +
                      fmt(a[1]) + ")",
                  d),
  });

  const double half = 3.0 * (std::hypot(a[0], a[1]) + 1.0);
  Box box;
  box.lo = {-half, -half};
  box.hi = {half, half};

  PlanarLinear out{
      SwitchingSystem(d, 2, {std::move(field0), std::move(field1)},
                      symmetric_two_rates(lambda0, lambda1, d), lambda0 + lambda1 + 1.0,
                      std::move(box)),
      A, a, lambda0, lambda1};
  return out;
}

double PlanarLinear::det_identity_lhs(std::span<const double> x) const {
  auto f0 = system.field(0).value(x);
  auto f1 = system.field(1).value(x);
  return f0[0] * f1[1] - f0[1] * f1[0];
}

double PlanarLinear::det_identity_rhs(std::span<const double> x) const {
  const double detA = A[0] * A[3] - A[1] * A[2];
  return detA * (a[0] * x[1] - a[1] * x[0]);
}

PlanarLinear planar_linear_rotation(double lambda0, double lambda1) {
  return planar_linear({-1.0, -1.0, 1.0, -1.0}, {1.0, 0.0}, lambda0, lambda1);
}

PlanarLinear planar_linear_segment(double lambda0, double lambda1) {
  return planar_linear({-1.0, 0.0, 0.0, -1.0}, {1.0, 0.0}, lambda0, lambda1);
}

IntervalBeta interval_beta(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("interval_beta needs lambda > 0");
  const int d = 1;
  auto field0 = VectorField({expr::parse("-x1", d)});
  auto field1 = VectorField({expr::parse("1 - x1", d)});
  Box box;
  box.lo = {0.0};
  box.hi = {1.0};
  IntervalBeta out{SwitchingSystem(d, 2, {std::move(field0), std::move(field1)},
                                   symmetric_two_rates(lambda, lambda, d), 2.0 * lambda + 1.0,
                                   std::move(box)),
                   lambda};
  return out;
}

double IntervalBeta::cdf0(double x) const { return special::beta_cdf(lambda, lambda + 1.0, x); }
double IntervalBeta::cdf1(double x) const { return special::beta_cdf(lambda + 1.0, lambda, x); }
double IntervalBeta::pdf0(double x) const { return special::beta_pdf(lambda, lambda + 1.0, x); }
double IntervalBeta::mean0() const { return lambda / (2.0 * lambda + 1.0); }

namespace {

Radulescu make_radulescu(double alpha, double lambda0, double lambda1, bool diag_frame) {
  if (!(alpha > 0.0)) throw DomainError("radulescu needs alpha > 0");
  const int d = 2;
  const std::string as = fmt(alpha);
  std::vector<VectorField> fields;
  if (!diag_frame) {
    fields.emplace_back(std::vector<expr::Expression>{
        expr::parse("-x1 + " + as, d),
        expr::parse("-x2 + " + as, d),
    });
    fields.emplace_back(std::vector<expr::Expression>{
        expr::parse("-x1 + " + as + "/(1 + x2^2)", d),
        expr::parse("-x2 + " + as + "/(1 + x1^2)", d),
    });
  } else {
    // u = (x+y)/2, v = (x-y)/2; both components of the slow field stay
    // proportional to v, so no catastrophic cancellation near the diagonal.
    const std::string den = "((1 + (x1 + x2)^2) * (1 + (x1 - x2)^2))";
    fields.emplace_back(std::vector<expr::Expression>{
        expr::parse("-x1 + " + as, d),
        expr::parse("-x2", d),
    });
    fields.emplace_back(std::vector<expr::Expression>{
        expr::parse("-x1 + " + as + "*(1 + x1^2 + x2^2)/" + den, d),
        expr::parse("-x2 + 2*" + as + "*x1*x2/" + den, d),
    });
  }

  Box box;
  box.lo = {0.0, 0.0};
  box.hi = {alpha + 1.0, alpha + 1.0};

  Radulescu out{SwitchingSystem(d, 2, std::move(fields),
                                symmetric_two_rates(lambda0, lambda1, d),
                                lambda0 + lambda1 + 2.0, std::move(box)),
                alpha, lambda0, lambda1};
  return out;
}

}  // namespace

Radulescu radulescu(double alpha, double lambda0, double lambda1) {
  return make_radulescu(alpha, lambda0, lambda1, false);
}

Radulescu radulescu_diag(double alpha, double lambda0, double lambda1) {
  return make_radulescu(alpha, lambda0, lambda1, true);
}

double Radulescu::b_newton() const {
  double b = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double f = b * b * b + b - alpha;
    const double df = 3.0 * b * b + 1.0;
    const double step = f / df;
    b -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(b))) break;
  }
  return b;
}

double Radulescu::b_closed_form() const {
  const double s = std::sqrt(4.0 / 27.0 + alpha * alpha);
  return std::cbrt((s + alpha) / 2.0) - std::cbrt((s - alpha) / 2.0);
}

double Radulescu::a_plus() const {
  if (alpha <= 2.0) throw DomainError("a_plus defined for alpha > 2");
  return (alpha + std::sqrt(alpha * alpha - 4.0)) / 2.0;
}

double Radulescu::eta1() const { return -3.0 + 2.0 * b_newton() / alpha; }
double Radulescu::eta2() const { return 1.0 - 2.0 * b_newton() / alpha; }

std::array<double, 2> Radulescu::sink_eigenvalues() const {
  return {-1.0 - 2.0 / alpha, -1.0 + 2.0 / alpha};
}

double Radulescu::wedge_decay_bound() const {
  return -(lambda1 - (kC * alpha - 1.0) * lambda0) / (lambda0 + lambda1);
}

SwitchingSystem by_name(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  for (const auto& [key, value] : params) {
    (void)value;
    if (key != "d" && key != "alpha" && key != "lambda" && key != "lambda0" && key != "lambda1")
      throw ConfigError("unknown example parameter: " + key);
  }

  if (name == "torus") return torus(static_cast<int>(get("d", 2)));
  if (name == "planar_linear")
    return planar_linear_rotation(get("lambda0", 1.0), get("lambda1", 1.0)).system;
  if (name == "planar_linear_segment")
    return planar_linear_segment(get("lambda0", 1.0), get("lambda1", 1.0)).system;
  if (name == "interval_beta") return interval_beta(get("lambda", 1.0)).system;
  if (name == "radulescu")
    return radulescu(get("alpha", 3.0), get("lambda0", 1.0), get("lambda1", 1.0)).system;
  if (name == "radulescu_diag")
    return radulescu_diag(get("alpha", 3.0), get("lambda0", 1.0), get("lambda1", 1.0)).system;
  throw ConfigError("unknown example: " + name);
}

std::vector<std::string> catalog() {
  return {"torus",         "planar_linear", "planar_linear_segment",
          "interval_beta", "radulescu",     "radulescu_diag"};
}

}  // namespace pdmp::examples
