#ifndef PDMP_SPECIAL_HPP
#define PDMP_SPECIAL_HPP

#include <vector>

namespace pdmp::special {

// Nodes and weights for int_0^inf e^{-s} g(s) ds ~ sum w_i g(s_i).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_laguerre(int order);

// Regularized incomplete beta I_x(a, b); continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

// CDF and density of the Beta(a, b) law on [0, 1].
double beta_cdf(double a, double b, double x);
double beta_pdf(double a, double b, double x);

}  // namespace pdmp::special

#endif  // PDMP_SPECIAL_HPP
