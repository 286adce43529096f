#include "pdmp/measure.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/special.hpp"

namespace pdmp::measure {

double EmpiricalMeasure::total_weight() const {
  double w = 0.0;
  for (const auto& a : atoms) w += a.weight;
  return w;
}

void EmpiricalMeasure::normalize() {
  const double w = total_weight();
  if (w <= 0.0) throw InsufficientData("empirical measure has no mass");
  for (auto& a : atoms) a.weight /= w;
}

double EmpiricalMeasure::integrate(const TestFn& f) const {
  double acc = 0.0;
  for (const auto& a : atoms) acc += a.weight * f(a.x, a.regime);
  return acc;
}

std::vector<std::pair<double, double>> EmpiricalMeasure::marginal(int axis, int regime) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (regime >= 0 && a.regime != regime) continue;
    out.emplace_back(a.x[static_cast<std::size_t>(axis)], a.weight);
  }
  return out;
}

EmpiricalMeasure discrete_occupation(const sim::HybridPath& path, std::size_t n) {
  if (n < 1 || path.skeleton.size() < n + 1)
    throw InsufficientData("skeleton has fewer than n jumps");
  EmpiricalMeasure m;
  m.provenance = Provenance::discrete;
  m.atoms.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k)
    m.atoms.push_back({path.skeleton[k].position, path.skeleton[k].regime, w});
  return m;
}

EmpiricalMeasure continuous_occupation(const sim::HybridPath& path, double T) {
  if (path.dense.size() < 2) throw InsufficientData("path has no dense samples");
  if (T > path.horizon + 1e-12) throw InsufficientData("T exceeds the path horizon");
  EmpiricalMeasure m;
  m.provenance = Provenance::continuous;
  m.atoms.reserve(path.dense.size());

  // Trapezoid weights per consecutive sample pair; samples always bracket the
  // jump times, so both endpoints of an interval share the regime.
  for (std::size_t k = 0; k + 1 < path.dense.size(); ++k) {
    const auto& a = path.dense[k];
    const auto& b = path.dense[k + 1];
    if (a.t >= T) break;
    const double hi = std::min(b.t, T);
    const double dt = hi - a.t;
    if (dt <= 0.0) continue;
    m.atoms.push_back({a.x, a.regime, 0.5 * dt});
    m.atoms.push_back({b.x, a.regime, 0.5 * dt});
  }
  if (m.atoms.empty()) throw InsufficientData("no samples before T");
  m.normalize();
  return m;
}

double apply_ktilde(const SwitchingSystem& sys, const TestFn& f, std::span<const double> x,
                    int regime, int quad_order, double h) {
  const auto quad = special::gauss_laguerre(quad_order);
  double acc = 0.0;
  Point cur(x.begin(), x.end());
  double cur_t = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    // Weights below ~1e-18 cannot move the sum; skip the (long) flow legs.
    if (quad.weights[i] < 1e-18) break;
    const double t = quad.nodes[i] / sys.lambda_bar();
    cur = flow::integrate(sys, regime, cur, t - cur_t, h).endpoint;
    cur_t = t;
    acc += quad.weights[i] * f(cur, regime);
  }
  return acc;
}

double correspondence_gap(const SwitchingSystem& sys, const sim::HybridPath& path,
                          const TestFn& f, double t, int quad_order, double h) {
  const auto cont = continuous_occupation(path, t);
  const double pi_t = cont.integrate(f);

  const std::size_t n = path.jumps_up_to(t);
  if (n == 0) throw InsufficientData("no jumps before t");
  const auto disc = discrete_occupation(path, n);
  // Pushforward: integrate K-tilde f against the discrete occupation measure.
  const double pi_n = disc.integrate([&](std::span<const double> y, int i) {
    return apply_ktilde(sys, f, y, i, quad_order, h);
  });
  return std::abs(pi_t - pi_n);
}

std::size_t Histogram::cells_per_regime() const {
  std::size_t c = 1;
  for (int k = 0; k < box.dimension(); ++k) c *= static_cast<std::size_t>(bins_per_axis);
  return c;
}

double& Histogram::at(int regime, std::size_t cell) {
  return mass[static_cast<std::size_t>(regime) * cells_per_regime() + cell];
}

double Histogram::at(int regime, std::size_t cell) const {
  return mass[static_cast<std::size_t>(regime) * cells_per_regime() + cell];
}

int default_bins(int dimension) {
  if (dimension <= 2) return 64;
  if (dimension == 3) return 16;
  throw GridMismatch("histograms rejected for dimension >= 4; use marginals");
}

Histogram histogram(const EmpiricalMeasure& m, const Box& box, int regimes,
                    int bins_per_axis) {
  if (box.dimension() >= 4) throw GridMismatch("histograms rejected for dimension >= 4");
  if (bins_per_axis < 1) throw GridMismatch("need at least one bin per axis");
  Histogram hist;
  hist.box = box;
  hist.bins_per_axis = bins_per_axis;
  hist.regimes = regimes;
  hist.mass.assign(static_cast<std::size_t>(regimes) * hist.cells_per_regime(), 0.0);

  const int d = box.dimension();
  for (const auto& a : m.atoms) {
    std::size_t cell = 0;
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      double rel = (a.x[ku] - box.lo[ku]) / box.extent(k);
      long b = static_cast<long>(rel * bins_per_axis);
      b = std::clamp<long>(b, 0, bins_per_axis - 1);
      cell = cell * static_cast<std::size_t>(bins_per_axis) + static_cast<std::size_t>(b);
    }
    hist.at(a.regime, cell) += a.weight;
  }

  double total = 0.0;
  for (double v : hist.mass) total += v;
  if (total > 0.0)
    for (double& v : hist.mass) v /= total;
  return hist;
}

double ks_distance_1d(std::vector<std::pair<double, double>> weighted_values,
                      const std::function<double(double)>& reference_cdf) {
  if (weighted_values.empty()) throw InsufficientData("empty sample");
  std::sort(weighted_values.begin(), weighted_values.end());
  double total = 0.0;
  for (const auto& [x, w] : weighted_values) total += w;
  if (total <= 0.0) throw InsufficientData("sample has no mass");

  double acc = 0.0, d = 0.0;
  for (const auto& [x, w] : weighted_values) {
    const double ref = reference_cdf(x);
    d = std::max(d, std::abs(acc / total - ref));  // left limit
    acc += w;
    d = std::max(d, std::abs(acc / total - ref));
  }
  return d;
}

double tv_distance(const Histogram& a, const Histogram& b) {
  if (a.bins_per_axis != b.bins_per_axis || a.regimes != b.regimes ||
      a.mass.size() != b.mass.size() || a.box.dimension() != b.box.dimension())
    throw GridMismatch("histogram grids are not compatible");
  for (int k = 0; k < a.box.dimension(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    if (a.box.lo[ku] != b.box.lo[ku] || a.box.hi[ku] != b.box.hi[ku])
      throw GridMismatch("histogram boxes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return 0.5 * s;
}

}  // namespace pdmp::measure
