#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdmp/examples.hpp"
#include "pdmp/measure.hpp"
#include "pdmp/simulate.hpp"
#include "pdmp/special.hpp"

using namespace pdmp;

namespace {

SwitchingSystem frozen_1d(double rate01 = 0.0, double rate10 = 0.0, double lambda_bar = 1.0) {
  const int d = 1;
  std::vector<VectorField> fields;
  fields.emplace_back(std::vector<expr::Expression>{expr::constant(0.0, d)});
  fields.emplace_back(std::vector<expr::Expression>{expr::constant(0.0, d)});
  Box box;
  box.lo = {0.0};
  box.hi = {1.0};
  std::vector<expr::Expression> rates{expr::constant(0.0, d), expr::constant(rate01, d),
                                      expr::constant(rate10, d), expr::constant(0.0, d)};
  return SwitchingSystem(d, 2, std::move(fields), std::move(rates), lambda_bar,
                         std::move(box));
}

SwitchingSystem decay_1d(double lambda_bar = 2.0) {
  const int d = 1;
  std::vector<VectorField> fields;
  fields.emplace_back(std::vector<expr::Expression>{expr::parse("-x1", d)});
  fields.emplace_back(std::vector<expr::Expression>{expr::parse("-x1", d)});
  Box box;
  box.lo = {-2.0};
  box.hi = {2.0};
  std::vector<expr::Expression> rates{expr::constant(0.0, d), expr::constant(0.5, d),
                                      expr::constant(0.5, d), expr::constant(0.0, d)};
  return SwitchingSystem(d, 2, std::move(fields), std::move(rates), lambda_bar,
                         std::move(box));
}

}  // namespace

TEST_CASE("gauss-laguerre weights integrate exactly what they should") {
  for (int order : {8, 32, 64}) {
    auto q = special::gauss_laguerre(order);
    double w = 0.0, wx = 0.0, wx2 = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      w += q.weights[i];
      wx += q.weights[i] * q.nodes[i];
      wx2 += q.weights[i] * q.nodes[i] * q.nodes[i];
    }
    CHECK(std::abs(w - 1.0) < 1e-12);    // int e^-s ds
    CHECK(std::abs(wx - 1.0) < 1e-10);   // int s e^-s ds
    CHECK(std::abs(wx2 - 2.0) < 1e-9);   // int s^2 e^-s ds
  }
}

TEST_CASE("regularized incomplete beta reference values") {
  CHECK(special::reg_inc_beta(2.0, 3.0, 0.5) == doctest::Approx(0.6875).epsilon(1e-12));
  CHECK(special::reg_inc_beta(1.0, 2.0, 0.25) == doctest::Approx(0.4375).epsilon(1e-12));
  CHECK(special::reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(special::reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("discrete occupation basics") {
  auto sys = frozen_1d();
  Rng rng(1);
  auto path = sim::sample_embedded(sys, {{0.25}, 0}, 50, rng, 0.1);

  auto one = measure::discrete_occupation(path, 1);
  REQUIRE(one.atoms.size() == 1);
  CHECK(one.atoms[0].weight == 1.0);
  CHECK(one.atoms[0].x[0] == 0.25);  // frozen flow

  auto ten = measure::discrete_occupation(path, 10);
  CHECK(ten.integrate([](std::span<const double>, int) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(measure::discrete_occupation(path, 51), InsufficientData);
}

TEST_CASE("continuous occupation of a frozen path is a point mass") {
  auto sys = frozen_1d();
  sim::SimOptions opt;
  opt.step = 0.1;
  opt.output_dt = 0.5;
  Rng rng(2);
  auto path = sim::sample_path(sys, {{0.25}, 0}, 10.0, opt, rng);
  auto occ = measure::continuous_occupation(path, 10.0);
  for (const auto& a : occ.atoms) {
    CHECK(a.x[0] == 0.25);
    CHECK(a.regime == 0);
  }
  CHECK(occ.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("continuous occupation integrates the exponential decay") {
  auto sys = decay_1d();
  sim::SimOptions opt;
  opt.step = 1e-3;
  opt.output_dt = 1e-3;
  Rng rng(3);
  const double T = 2.0;
  auto path = sim::sample_path(sys, {{1.0}, 0}, T, opt, rng);
  auto occ = measure::continuous_occupation(path, T);
  const double got = occ.integrate([](std::span<const double> x, int) { return x[0]; });
  const double want = (1.0 - std::exp(-T)) / T;
  CHECK(std::abs(got - want) < 1e-4);
}

TEST_CASE("regime marginal of the telegraph occupation") {
  auto sys = frozen_1d(1.0, 1.0, 3.0);
  sim::SimOptions opt;
  opt.step = 0.1;
  opt.output_dt = 0.5;
  Rng rng(4);
  const double T = 3000.0;
  auto path = sim::sample_path(sys, {{0.25}, 0}, T, opt, rng);
  auto occ = measure::continuous_occupation(path, T);
  double zero_mass = 0.0;
  for (const auto& a : occ.atoms)
    if (a.regime == 0) zero_mass += a.weight;
  CHECK(std::abs(zero_mass - 0.5) < 0.01);
}

TEST_CASE("K-tilde of the constant function is one on the whole probe grid") {
  auto ex = examples::interval_beta(2.0);
  const measure::TestFn one = [](std::span<const double>, int) { return 1.0; };
  for (const auto& p : ex.system.probe_points())
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(measure::apply_ktilde(ex.system, one, p, i, 32, 0.01) - 1.0) < 1e-10);
}

TEST_CASE("K-tilde is the identity for frozen flows") {
  auto sys = frozen_1d(0.5, 0.5, 2.0);
  const measure::TestFn f = [](std::span<const double> x, int) { return 3.0 * x[0] + 1.0; };
  const double got = measure::apply_ktilde(sys, f, std::vector<double>{0.4}, 0, 32, 0.1);
  CHECK(std::abs(got - 2.2) < 1e-10);
}

TEST_CASE("K-tilde matches the closed form for linear decay") {
  // lambda_bar = 2, F = -x, f = x: K f(x) = (2/3) x.
  auto sys = decay_1d(2.0);
  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  const double x0 = 0.8;
  const double got = measure::apply_ktilde(sys, f, std::vector<double>{x0}, 0, 32, 1e-3);
  CHECK(std::abs(got - (2.0 / 3.0) * x0) < 1e-8);

  // Self-validation: doubling the order must not move the result.
  const double got64 = measure::apply_ktilde(sys, f, std::vector<double>{x0}, 0, 64, 1e-3);
  CHECK(std::abs(got - got64) < 1e-8);
}

TEST_CASE("correspondence gap vanishes on frozen systems and constants") {
  auto sys = frozen_1d(0.5, 0.5, 2.0);
  sim::SimOptions opt;
  opt.step = 0.1;
  opt.output_dt = 0.5;
  Rng rng(6);
  auto path = sim::sample_path(sys, {{0.25}, 0}, 50.0, opt, rng);

  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  CHECK(measure::correspondence_gap(sys, path, f, 50.0, 32, 0.1) < 1e-10);

  const measure::TestFn one = [](std::span<const double>, int) { return 1.0; };
  CHECK(measure::correspondence_gap(sys, path, one, 50.0, 32, 0.1) < 1e-12);
}

TEST_CASE("correspondence gap shrinks with time on an ergodic example") {
  auto ex = examples::interval_beta(1.0);
  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  sim::SimOptions opt;
  opt.step = 2e-3;
  opt.output_dt = 0.05;

  struct Pair {
    double small, large;
  };
  auto pairs = sim::ensemble<Pair>(
      100, 70,
      [&](long, Rng& rng) {
        auto path = sim::sample_path(ex.system, {{0.5}, 0}, 1000.0, opt, rng);
        return Pair{measure::correspondence_gap(ex.system, path, f, 10.0, 32, 0.02),
                    measure::correspondence_gap(ex.system, path, f, 1000.0, 32, 0.02)};
      },
      0);
  // Both gaps are CLT-scale quantities, so the per-run event
  // gap(1000) < gap(10) has probability about
  // 1 - (2/pi) atan(sqrt(10/1000)) ~ 0.94; 85/100 sits three sigmas below.
  int improved = 0;
  std::vector<double> small, large;
  for (const auto& p : pairs) {
    if (p.large < p.small) ++improved;
    small.push_back(p.small);
    large.push_back(p.large);
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  CHECK(improved >= 85);
  CHECK(large[50] < 0.2 * small[50]);  // median gap shrinks by far more than 5x
}

TEST_CASE("pushforward consistency of the discrete occupation") {
  auto ex = examples::interval_beta(2.0);
  sim::SimOptions opt;
  opt.step = 1e-2;
  opt.output_dt = 0.1;
  Rng rng(8);
  auto path = sim::sample_path(ex.system, {{0.5}, 0}, 20.0, opt, rng);
  const std::size_t n = path.jumps_up_to(20.0);
  auto disc = measure::discrete_occupation(path, n);

  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  const double via_integrate = disc.integrate([&](std::span<const double> y, int i) {
    return measure::apply_ktilde(ex.system, f, y, i, 32, 1e-2);
  });
  double pointwise = 0.0;
  for (const auto& a : disc.atoms)
    pointwise += a.weight * measure::apply_ktilde(ex.system, f, a.x, a.regime, 32, 1e-2);
  CHECK(via_integrate == pointwise);
}

TEST_CASE("histogram and distance basics") {
  measure::EmpiricalMeasure m;
  Box box;
  box.lo = {0.0};
  box.hi = {1.0};
  m.atoms = {{{0.1}, 0, 0.5}, {{0.9}, 1, 0.5}};

  auto h1 = measure::histogram(m, box, 2, 8);
  auto h2 = measure::histogram(m, box, 2, 8);
  CHECK(measure::tv_distance(h1, h2) == 0.0);

  measure::EmpiricalMeasure a, b;
  a.atoms = {{{0.1}, 0, 1.0}};
  b.atoms = {{{0.9}, 0, 1.0}};
  CHECK(measure::tv_distance(measure::histogram(a, box, 2, 8),
                             measure::histogram(b, box, 2, 8)) == 1.0);

  auto coarse = measure::histogram(a, box, 2, 4);
  CHECK_THROWS_AS(measure::tv_distance(h1, coarse), GridMismatch);

  CHECK(measure::default_bins(1) == 64);
  CHECK(measure::default_bins(3) == 16);
  CHECK_THROWS_AS(measure::default_bins(4), GridMismatch);
}

TEST_CASE("KS distance of a large uniform sample") {
  Rng rng(10);
  std::vector<std::pair<double, double>> sample;
  sample.reserve(1000000);
  for (long k = 0; k < 1000000; ++k) sample.emplace_back(rng.uniform(), 1.0);
  const double ks = measure::ks_distance_1d(sample, [](double x) {
    return std::clamp(x, 0.0, 1.0);
  });
  CHECK(ks < 0.002);
}

TEST_CASE("independent long runs get closer in TV as the horizon grows") {
  auto ex = examples::interval_beta(2.0);
  sim::SimOptions opt;
  opt.step = 5e-3;
  opt.output_dt = 0.05;
  const int bins = 64;

  struct Pair {
    double tv_short, tv_long;
  };
  const int pairs_n = 50;
  auto pairs = sim::ensemble<Pair>(
      pairs_n, 1234,
      [&](long k, Rng& rng) {
        // Two independent paths per pair: the worker stream drives the first,
        // a derived stream the second.
        Rng other = Rng::stream(987654321, static_cast<std::uint64_t>(k));
        auto run = [&](Rng& r, double T) {
          auto path = sim::sample_path(ex.system, {{0.5}, 0}, T, opt, r);
          return measure::histogram(measure::continuous_occupation(path, T), ex.system.box(),
                                    2, bins);
        };
        auto a_long = run(rng, 1e4);
        auto b_long = run(other, 1e4);
        auto a_short = run(rng, 1e2);
        auto b_short = run(other, 1e2);
        return Pair{measure::tv_distance(a_short, b_short),
                    measure::tv_distance(a_long, b_long)};
      },
      0);
  int improved = 0;
  for (const auto& p : pairs)
    if (p.tv_long < p.tv_short) ++improved;
  CHECK(improved >= static_cast<int>(0.95 * pairs_n));
}
