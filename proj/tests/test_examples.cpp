#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pdmp/examples.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/simulate.hpp"
#include "pdmp/special.hpp"

using namespace pdmp;

TEST_CASE("every catalog factory passes validation") {
  CHECK(examples::torus(2).validate().ok());
  CHECK(examples::torus(3).validate().ok());
  CHECK(examples::planar_linear_rotation().system.validate().ok());
  CHECK(examples::planar_linear_segment().system.validate().ok());
  CHECK(examples::interval_beta(0.5).system.validate().ok());
  CHECK(examples::interval_beta(1.0).system.validate().ok());
  CHECK(examples::interval_beta(2.0).system.validate().ok());
  CHECK(examples::radulescu(3.0, 1.0, 4.0).system.validate().ok());
  CHECK(examples::radulescu(3.0, 1.0, 0.05).system.validate().ok());
  CHECK(examples::radulescu_diag(3.0, 1.0, 4.0).system.validate().ok());
}

TEST_CASE("factory lookup by name") {
  auto sys = examples::by_name("interval_beta", {{"lambda", 2.0}});
  CHECK(sys.lambda_bar() == 5.0);
  CHECK_THROWS_AS(examples::by_name("nope", {}), ConfigError);
  CHECK_THROWS_AS(examples::by_name("torus", {{"gamma", 1.0}}), ConfigError);
}

TEST_CASE("planar determinant identity at random points") {
  auto ex = examples::planar_linear_rotation();
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x{8.0 * rng.uniform() - 4.0, 8.0 * rng.uniform() - 4.0};
    CHECK(std::abs(ex.det_identity_lhs(x) - ex.det_identity_rhs(x)) < 1e-10);
  }
}

TEST_CASE("interval beta reference law") {
  auto two = examples::interval_beta(2.0);
  CHECK(two.mean0() == doctest::Approx(0.4).epsilon(1e-15));

  // Oracle: Simpson quadrature of x * pdf0 over [0, 1].
  const int n = 2000;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double x = static_cast<double>(k) / n;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * x * two.pdf0(x);
  }
  acc /= 3.0 * n;
  CHECK(acc == doctest::Approx(two.mean0()).epsilon(1e-9));

  auto one = examples::interval_beta(1.0);
  CHECK(one.mean0() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // lambda = 1: density proportional to (1 - x).
  CHECK(one.pdf0(0.25) == doctest::Approx(1.5).epsilon(1e-12));

  // lambda < 1: the regime-0 density blows up at 0.
  auto half = examples::interval_beta(0.5);
  CHECK(half.pdf0(1e-6) > 100.0);
  CHECK(half.pdf0(1e-6) > half.pdf0(0.1) * 10.0);
}

TEST_CASE("competing-fields reference quantities at alpha = 3") {
  auto ex = examples::radulescu(3.0, 1.0, 4.0);

  const double b = ex.b_newton();
  CHECK(b == doctest::Approx(1.21341).epsilon(1e-5));
  CHECK(std::abs(b - ex.b_closed_form()) < 1e-12);
  CHECK(std::abs(b * b * b + b - 3.0) < 1e-12);

  const double a = ex.a_plus();
  CHECK(a == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(std::abs(a * a - 3.0 * a + 1.0) < 1e-12);

  // Field residuals at the critical points.
  auto fb = ex.system.field(1).value(std::vector<double>{b, b});
  CHECK(std::hypot(fb[0], fb[1]) < 1e-10);
  auto fa = ex.system.field(1).value(std::vector<double>{a, 1.0 / a});
  CHECK(std::hypot(fa[0], fa[1]) < 1e-10);

  // Symbolic Jacobian eigenvalues at (b, b) against the closed forms,
  // via an independent eigensolver.
  std::vector<double> jac(4);
  ex.system.field(1).jacobian(std::vector<double>{b, b}, jac);
  Eigen::Matrix2d J;
  J << jac[0], jac[1], jac[2], jac[3];
  Eigen::EigenSolver<Eigen::Matrix2d> eig(J);
  std::vector<double> got{eig.eigenvalues()[0].real(), eig.eigenvalues()[1].real()};
  std::sort(got.begin(), got.end());
  CHECK(std::abs(eig.eigenvalues()[0].imag()) < 1e-12);
  CHECK(got[0] == doctest::Approx(ex.eta1()).epsilon(1e-10));
  CHECK(got[1] == doctest::Approx(ex.eta2()).epsilon(1e-10));
  CHECK(ex.eta1() < 0.0);
  CHECK(ex.eta2() > 0.0);  // saddle for alpha > 2

  // Sink eigenvalues -1 +- 2/alpha.
  auto sink = ex.sink_eigenvalues();
  CHECK(sink[0] == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));
  CHECK(sink[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));

  // Transience threshold arithmetic: c alpha - 1 at alpha = 3.
  CHECK(examples::Radulescu::kC == doctest::Approx(3.0 * std::sqrt(3.0) / 8.0).epsilon(1e-15));
  CHECK(examples::Radulescu::kC * 3.0 - 1.0 == doctest::Approx(0.94856).epsilon(1e-4));
  CHECK(ex.wedge_decay_bound() == doctest::Approx(-0.61029).epsilon(1e-4));
}

TEST_CASE("the wedge below the diagonal is invariant along sampled paths") {
  auto ex = examples::radulescu(3.0, 1.0, 1.0);
  sim::SimOptions opt;
  opt.step = 1e-3;
  opt.output_dt = 0.05;
  Rng rng(21);
  // Strict ordering is checkable as long as x - y stays above the double
  // resolution; with these rates the gap decays like e^{-t/2} at worst, so
  // T = 25 keeps it far from the ulp scale.
  auto path = sim::sample_path(ex.system, {{2.5, 0.5}, 0}, 25.0, opt, rng);
  bool strict = true, nonneg = true;
  for (const auto& s : path.dense) {
    strict = strict && s.x[0] > s.x[1];
    nonneg = nonneg && s.x[1] > 0.0;
  }
  CHECK(strict);
  CHECK(nonneg);

  // In the diagonal frame the same invariance holds for arbitrarily long
  // horizons: v stays strictly positive because it evolves multiplicatively.
  auto diag = examples::radulescu_diag(3.0, 1.0, 1.0);
  Rng rng2(22);
  auto vpath = sim::sample_path(diag.system, {{1.5, 1.0}, 0}, 300.0, opt, rng2);
  bool positive = true;
  for (const auto& s : vpath.dense) positive = positive && s.x[1] > 0.0;
  CHECK(positive);
}

TEST_CASE("diagonal-frame dynamics agree with the plain frame") {
  // Mapping (x, y) -> (u, v) = ((x+y)/2, (x-y)/2) conjugates the two systems:
  // flowing then mapping equals mapping then flowing.
  auto xy = examples::radulescu(3.0);
  auto uv = examples::radulescu_diag(3.0);
  Rng rng(31);
  for (int regime = 0; regime < 2; ++regime) {
    for (int rep = 0; rep < 5; ++rep) {
      const double x = 0.5 + 3.0 * rng.uniform();
      const double y = 0.25 + 0.5 * x * rng.uniform();  // stay in the wedge
      const double t = rng.uniform();
      auto fx = flow::integrate(xy.system, regime, std::vector<double>{x, y}, t, 1e-3);
      auto fu = flow::integrate(uv.system, regime,
                                std::vector<double>{(x + y) / 2.0, (x - y) / 2.0}, t, 1e-3);
      CHECK(fu.endpoint[0] ==
            doctest::Approx((fx.endpoint[0] + fx.endpoint[1]) / 2.0).epsilon(1e-9));
      CHECK(fu.endpoint[1] ==
            doctest::Approx((fx.endpoint[0] - fx.endpoint[1]) / 2.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("torus defaults") {
  auto sys = examples::torus(3);
  CHECK(sys.regimes() == 3);
  CHECK(sys.lambda_bar() == 4.0);
  CHECK(sys.box().wraps(0));
  CHECK(sys.box().wraps(2));
}
