#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdmp/examples.hpp"
#include "pdmp/flow.hpp"
#include "pdmp/reach.hpp"

using namespace pdmp;

namespace {

SwitchingSystem zero_fields_2d() {
  const int d = 2;
  std::vector<VectorField> fields;
  for (int i = 0; i < 2; ++i)
    fields.emplace_back(
        std::vector<expr::Expression>{expr::constant(0.0, d), expr::constant(0.0, d)});
  Box box;
  box.lo = {-1.0, -1.0};
  box.hi = {1.0, 1.0};
  std::vector<expr::Expression> rates{expr::constant(0.0, d), expr::constant(1.0, d),
                                      expr::constant(1.0, d), expr::constant(0.0, d)};
  return SwitchingSystem(d, 2, std::move(fields), std::move(rates), 3.0, std::move(box));
}

SwitchingSystem contracting_2d() {
  const int d = 2;
  std::vector<VectorField> fields;
  for (int i = 0; i < 2; ++i)
    fields.emplace_back(
        std::vector<expr::Expression>{expr::parse("-x1", d), expr::parse("-x2", d)});
  Box box;
  box.lo = {-2.0, -2.0};
  box.hi = {2.0, 2.0};
  std::vector<expr::Expression> rates{expr::constant(0.0, d), expr::constant(1.0, d),
                                      expr::constant(1.0, d), expr::constant(0.0, d)};
  return SwitchingSystem(d, 2, std::move(fields), std::move(rates), 3.0, std::move(box));
}

double dist_to_segment(const Point& p, const Point& a, const Point& b) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    ab2 += (b[k] - a[k]) * (b[k] - a[k]);
    ap_ab += (p[k] - a[k]) * (b[k] - a[k]);
  }
  const double s = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double c = a[k] + s * (b[k] - a[k]);
    d2 += (p[k] - c) * (p[k] - c);
  }
  return std::sqrt(d2);
}

// Fraction of cells of a that are not within `tol` cells of any cell of b,
// plus the converse, over the union size.
double tolerant_symdiff(const reach::ReachGrid& a, const reach::ReachGrid& b, int tol) {
  auto near_any = [&](const reach::ReachGrid& from, std::size_t cell,
                      const reach::ReachGrid& in) {
    const Point c = from.center_of(cell);
    const double band = (tol + 0.5) * std::sqrt(2.0) *
                        std::max(in.cell_width(0), in.cell_width(1));
    for (std::size_t other = 0; other < in.occupied.size(); ++other) {
      if (!in.occupied[other]) continue;
      const Point oc = in.center_of(other);
      double d2 = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) d2 += (c[k] - oc[k]) * (c[k] - oc[k]);
      if (std::sqrt(d2) <= band) return true;
    }
    return false;
  };
  std::size_t mismatch = 0, uni = 0;
  for (std::size_t cell = 0; cell < a.occupied.size(); ++cell) {
    if (a.occupied[cell] || b.occupied[cell]) ++uni;
    if (a.occupied[cell] && !near_any(a, cell, b)) ++mismatch;
    if (b.occupied[cell] && !near_any(b, cell, a)) ++mismatch;
  }
  return uni == 0 ? 0.0 : static_cast<double>(mismatch) / static_cast<double>(uni);
}

}  // namespace

TEST_CASE("zero fields occupy only the start cell") {
  auto sys = zero_fields_2d();
  reach::ReachOptions opt;
  opt.resolution = 32;
  auto grid = reach::reachable(sys, Point{0.3, 0.3}, opt);
  CHECK(grid.occupied_count() == 1);
  CHECK(grid.occupied[grid.cell_of(Point{0.3, 0.3})] == 1);
}

TEST_CASE("contracting flow reaches the ray to the origin") {
  auto sys = contracting_2d();
  reach::ReachOptions opt;
  opt.resolution = 128;
  auto grid = reach::reachable(sys, Point{1.0, 0.0}, opt);

  const Point a{0.0, 0.0}, b{1.0, 0.0};
  const double w = grid.cell_width(0);
  std::size_t n = 0;
  for (std::size_t cell = 0; cell < grid.occupied.size(); ++cell) {
    if (!grid.occupied[cell]) continue;
    ++n;
    CHECK(dist_to_segment(grid.center_of(cell), a, b) <= 1.5 * std::sqrt(2.0) * w);
  }
  CHECK(n >= 2);

  // Coverage: at least 90% of segment probes have an occupied cell nearby.
  int covered = 0;
  const int probes = 100;
  for (int k = 0; k < probes; ++k) {
    const Point p{(k + 0.5) / probes, 0.0};
    bool hit = false;
    for (std::size_t cell = 0; cell < grid.occupied.size() && !hit; ++cell)
      if (grid.occupied[cell] && dist_to_segment(grid.center_of(cell), p, p) <= 1.5 * w)
        hit = true;
    if (hit) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("torus translations reach every cell") {
  auto sys = examples::torus(2);
  reach::ReachOptions opt;
  opt.resolution = 64;
  opt.tau = 0.25 / 64.0;
  auto grid = reach::reachable(sys, Point{0.0, 0.0}, opt);
  CHECK(grid.occupied_count() == grid.cell_count());
}

TEST_CASE("occupancy grows monotonically with the iteration budget") {
  auto ex = examples::radulescu(3.0);
  reach::ReachOptions small, large;
  small.resolution = large.resolution = 64;
  small.max_iters = 5;
  large.max_iters = 6;
  auto g1 = reach::reachable(ex.system, Point{2.5, 0.5}, small);
  auto g2 = reach::reachable(ex.system, Point{2.5, 0.5}, large);
  for (std::size_t c = 0; c < g1.occupied.size(); ++c)
    if (g1.occupied[c]) CHECK(g2.occupied[c] == 1);
}

TEST_CASE("accessible set of the segment example pinches onto [0, a]") {
  auto ex = examples::planar_linear_segment();
  reach::ReachOptions opt;
  opt.resolution = 64;
  auto grid = reach::accessible_set(ex.system, 16, opt);

  REQUIRE(grid.occupied_count() > 0);
  const Point a{0.0, 0.0}, b{1.0, 0.0};
  const double diag = std::sqrt(2.0) * grid.cell_width(0);
  for (std::size_t cell = 0; cell < grid.occupied.size(); ++cell)
    if (grid.occupied[cell])
      CHECK(dist_to_segment(grid.center_of(cell), a, b) <= 2.0 * diag);
}

TEST_CASE("accessible-set estimate is strongly positively invariant at grid scale") {
  auto ex = examples::radulescu(3.0);
  reach::ReachOptions opt;
  opt.resolution = 64;
  auto grid = reach::accessible_set(ex.system, 8, opt);
  REQUIRE(grid.occupied_count() > 0);

  flow::Stepper stepper(ex.system);
  std::size_t ok = 0, total = 0;
  for (std::size_t cell = 0; cell < grid.occupied.size(); ++cell) {
    if (!grid.occupied[cell]) continue;
    for (int regime = 0; regime < 2; ++regime) {
      ++total;
      Point x = grid.center_of(cell);
      stepper.step(regime, x, grid.tau);
      for (int k = 0; k < 2; ++k) {
        auto ku = static_cast<std::size_t>(k);
        x[ku] = std::clamp(x[ku], grid.box.lo[ku], grid.box.hi[ku]);
      }
      // Landing cell or its 1-neighborhood is occupied.
      const std::size_t res = static_cast<std::size_t>(grid.resolution);
      const std::size_t c = grid.cell_of(x);
      const long ci = static_cast<long>(c / res), cj = static_cast<long>(c % res);
      bool hit = false;
      for (long di = -1; di <= 1 && !hit; ++di)
        for (long dj = -1; dj <= 1 && !hit; ++dj) {
          const long ni = ci + di, nj = cj + dj;
          if (ni < 0 || nj < 0 || ni >= grid.resolution || nj >= grid.resolution) continue;
          if (grid.occupied[static_cast<std::size_t>(ni) * res +
                            static_cast<std::size_t>(nj)])
            hit = true;
        }
      if (hit) ++ok;
    }
  }
  CHECK(static_cast<double>(ok) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("doubling the resolution barely moves the estimate") {
  auto ex = examples::radulescu(3.0);
  reach::ReachOptions coarse, fine;
  coarse.resolution = 32;
  fine.resolution = 64;
  auto a = reach::accessible_set(ex.system, 8, coarse);
  auto b_fine = reach::accessible_set(ex.system, 8, fine);

  // Map the fine estimate down to the coarse grid.
  reach::ReachGrid b = a;
  std::fill(b.occupied.begin(), b.occupied.end(), 0);
  for (std::size_t cell = 0; cell < b_fine.occupied.size(); ++cell)
    if (b_fine.occupied[cell]) b.occupied[b.cell_of(b_fine.center_of(cell))] = 1;

  CHECK(tolerant_symdiff(a, b, 1) <= 0.10);
}

TEST_CASE("omega limit of a contracting flow is the sink cell") {
  auto sys = contracting_2d();
  reach::ReachOptions opt;
  opt.resolution = 64;
  auto grid = reach::omega_limit(sys, Point{1.0, 0.0}, 10.0, opt);
  REQUIRE(grid.occupied_count() > 0);
  const double diag = std::sqrt(2.0) * grid.cell_width(0);
  for (std::size_t cell = 0; cell < grid.occupied.size(); ++cell)
    if (grid.occupied[cell]) {
      const Point c = grid.center_of(cell);
      CHECK(std::hypot(c[0], c[1]) <= 2.0 * diag);
    }
}

TEST_CASE("omega limit from the diagonal equilibrium matches the accessible set") {
  auto ex = examples::radulescu(3.0);
  reach::ReachOptions opt;
  opt.resolution = 64;
  auto omega = reach::omega_limit(ex.system, Point{3.0, 3.0}, 50.0, opt);
  auto gamma = reach::accessible_set(ex.system, 8, opt);
  CHECK(tolerant_symdiff(omega, gamma, 1) <= 0.05);
}

TEST_CASE("omega limit on the torus is everything") {
  auto sys = examples::torus(2);
  reach::ReachOptions opt;
  opt.resolution = 32;
  auto grid = reach::omega_limit(sys, Point{0.1, 0.2}, 1.0, opt);
  CHECK(grid.occupied_count() == grid.cell_count());
}

TEST_CASE("overly coarse micro steps are rejected") {
  auto ex = examples::radulescu(3.0);
  reach::ReachOptions opt;
  opt.resolution = 16;
  opt.tau = 10.0;
  CHECK_THROWS_AS(reach::reachable(ex.system, Point{2.0, 2.0}, opt), ResolutionTooCoarse);
}

TEST_CASE("reachability in dimension >= 4 is rejected") {
  const int d = 4;
  std::vector<VectorField> fields;
  for (int i = 0; i < 2; ++i) {
    std::vector<expr::Expression> comps;
    for (int c = 0; c < d; ++c) comps.push_back(expr::constant(0.0, d));
    fields.emplace_back(std::move(comps));
  }
  Box box;
  box.lo.assign(4, 0.0);
  box.hi.assign(4, 1.0);
  std::vector<expr::Expression> rates{expr::constant(0.0, d), expr::constant(1.0, d),
                                      expr::constant(1.0, d), expr::constant(0.0, d)};
  SwitchingSystem sys(d, 2, std::move(fields), std::move(rates), 3.0, std::move(box));
  CHECK_THROWS_AS(reach::reachable(sys, Point{0.5, 0.5, 0.5, 0.5}, reach::ReachOptions{}),
                  ResolutionTooCoarse);
}
