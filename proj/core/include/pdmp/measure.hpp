#ifndef PDMP_MEASURE_HPP
#define PDMP_MEASURE_HPP

#include <functional>
#include <string>
#include <vector>

#include "pdmp/simulate.hpp"
#include "pdmp/system.hpp"

namespace pdmp::measure {

// Test function on M x E.
using TestFn = std::function<double(std::span<const double>, int)>;

enum class Provenance { discrete, continuous, pushforward };

// Weighted point cloud on M x E.
struct EmpiricalMeasure {
  struct Atom {
    Point x;
    int regime = 0;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;
  Provenance provenance = Provenance::discrete;

  double total_weight() const;
  void normalize();

  double integrate(const TestFn& f) const;

  // Weighted values of one coordinate, optionally restricted to a regime
  // (regime < 0 keeps everything). Used for 1-d marginal statistics.
  std::vector<std::pair<double, double>> marginal(int axis, int regime = -1) const;
};

// Discrete occupation measure: equal weights 1/n on skeleton entries 1..n.
EmpiricalMeasure discrete_occupation(const sim::HybridPath& path, std::size_t n);

// Continuous occupation measure on [0, T]: trapezoid weights on the dense
// grid, split at jump times.
EmpiricalMeasure continuous_occupation(const sim::HybridPath& path, double T);

// (K-tilde f)(x, i) = int_0^inf lambda_bar e^{-lambda_bar t} f(flow_t(x), i) dt
// by Gauss-Laguerre quadrature with nodes rescaled by 1/lambda_bar; the flow
// is resolved in a single pass over the increasing node times.
double apply_ktilde(const SwitchingSystem& sys, const TestFn& f, std::span<const double> x,
                    int regime, int quad_order = 32, double h = flow::kDefaultStep);

// | Pi_t f - tilde-Pi_{N_t} (K-tilde f) | for a path with horizon >= t.
double correspondence_gap(const SwitchingSystem& sys, const sim::HybridPath& path,
                          const TestFn& f, double t, int quad_order = 32,
                          double h = flow::kDefaultStep);

// Per-regime histogram over the box.
struct Histogram {
  Box box;
  int bins_per_axis = 0;
  int regimes = 0;
  std::vector<double> mass;  // regime-major, then row-major cells

  std::size_t cells_per_regime() const;
  double& at(int regime, std::size_t cell);
  double at(int regime, std::size_t cell) const;
};

// Default bins: 64 per axis for d <= 2, 16 for d = 3; d >= 4 rejected.
int default_bins(int dimension);
Histogram histogram(const EmpiricalMeasure& m, const Box& box, int regimes,
                    int bins_per_axis);

// Kolmogorov-Smirnov distance between a weighted 1-d sample and a reference
// CDF.
double ks_distance_1d(std::vector<std::pair<double, double>> weighted_values,
                      const std::function<double(double)>& reference_cdf);

// Total variation distance between two histograms on the same grid.
double tv_distance(const Histogram& a, const Histogram& b);

}  // namespace pdmp::measure

#endif  // PDMP_MEASURE_HPP
