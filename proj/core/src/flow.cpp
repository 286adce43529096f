#include "pdmp/flow.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pdmp::flow {

namespace {

// Scratch buffers for one RK4 integration; sized once per call.
struct Rk4Work {
  std::vector<double> k1, k2, k3, k4, tmp, scratch;

  explicit Rk4Work(int d, std::size_t expr_scratch)
      : k1(static_cast<std::size_t>(d)),
        k2(static_cast<std::size_t>(d)),
        k3(static_cast<std::size_t>(d)),
        k4(static_cast<std::size_t>(d)),
        tmp(static_cast<std::size_t>(d)),
        scratch(std::max<std::size_t>(1, expr_scratch)) {}
};

void rk4_step(const VectorField& f, std::span<double> x, double h, Rk4Work& w) {
  const std::size_t d = x.size();
  f.value(x, w.k1, w.scratch.data());
  for (std::size_t k = 0; k < d; ++k) w.tmp[k] = x[k] + 0.5 * h * w.k1[k];
  f.value(w.tmp, w.k2, w.scratch.data());
  for (std::size_t k = 0; k < d; ++k) w.tmp[k] = x[k] + 0.5 * h * w.k2[k];
  f.value(w.tmp, w.k3, w.scratch.data());
  for (std::size_t k = 0; k < d; ++k) w.tmp[k] = x[k] + h * w.k3[k];
  f.value(w.tmp, w.k4, w.scratch.data());
  for (std::size_t k = 0; k < d; ++k)
    x[k] += h / 6.0 * (w.k1[k] + 2.0 * w.k2[k] + 2.0 * w.k3[k] + w.k4[k]);
}

long clamp_to_box(const Box& box, std::span<double> x, double margin) {
  long events = 0;
  for (int k = 0; k < box.dimension(); ++k) {
    if (box.wraps(k)) continue;
    auto ku = static_cast<std::size_t>(k);
    if (x[ku] < box.lo[ku] - margin) {
      x[ku] = box.lo[ku] - margin;
      ++events;
    } else if (x[ku] > box.hi[ku] + margin) {
      x[ku] = box.hi[ku] + margin;
      ++events;
    }
  }
  return events;
}

}  // namespace

Stepper::Stepper(const SwitchingSystem& sys) : sys_(&sys) {
  const auto d = static_cast<std::size_t>(sys.dimension());
  std::size_t sneed = 1;
  for (int i = 0; i < sys.regimes(); ++i) sneed = std::max(sneed, sys.field(i).scratch_need());
  k1_.resize(d);
  k2_.resize(d);
  k3_.resize(d);
  k4_.resize(d);
  tmp_.resize(d);
  scratch_.resize(sneed);
}

void Stepper::step(int regime, std::span<double> x, double h) {
  const VectorField& f = sys_->field(regime);
  const std::size_t d = x.size();
  f.value(x, k1_, scratch_.data());
  for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + 0.5 * h * k1_[k];
  f.value(tmp_, k2_, scratch_.data());
  for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + 0.5 * h * k2_[k];
  f.value(tmp_, k3_, scratch_.data());
  for (std::size_t k = 0; k < d; ++k) tmp_[k] = x[k] + h * k3_[k];
  f.value(tmp_, k4_, scratch_.data());
  for (std::size_t k = 0; k < d; ++k)
    x[k] += h / 6.0 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
  sys_->box().wrap_point(x);
}

FlowResult integrate(const SwitchingSystem& sys, int regime, std::span<const double> x0,
                     double t, double h, double clamp_margin) {
  if (!(t >= 0.0)) throw DomainError("integration time must be >= 0");
  if (!(h > 0.0)) throw DomainError("step size must be > 0");
  const VectorField& f = sys.field(regime);
  FlowResult res;
  res.endpoint.assign(x0.begin(), x0.end());
  if (t == 0.0) return res;

  Rk4Work work(sys.dimension(), f.scratch_need());
  const long full = static_cast<long>(t / h);
  for (long n = 0; n < full; ++n) {
    rk4_step(f, res.endpoint, h, work);
    sys.box().wrap_point(res.endpoint);
    res.clamp_events += clamp_to_box(sys.box(), res.endpoint, clamp_margin);
    ++res.steps;
  }
  const double rest = t - static_cast<double>(full) * h;
  if (rest > 0.0) {
    rk4_step(f, res.endpoint, rest, work);
    sys.box().wrap_point(res.endpoint);
    res.clamp_events += clamp_to_box(sys.box(), res.endpoint, clamp_margin);
    ++res.steps;
  }
  return res;
}

CompositeResult composite_flow(const SwitchingSystem& sys, std::span<const double> x0,
                               const JumpSequence& seq, double h) {
  seq.check();
  CompositeResult res;
  res.points.emplace_back(x0.begin(), x0.end());
  for (int k = 0; k < seq.legs(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    auto leg = integrate(sys, seq.indices[ku], res.points.back(), seq.durations[ku], h);
    res.clamp_events += leg.clamp_events;
    res.points.push_back(std::move(leg.endpoint));
  }
  res.endpoint = res.points.back();
  return res;
}

FlowResult variational_integrate(const SwitchingSystem& sys, int regime,
                                 std::span<const double> x0, double t, double h) {
  if (!(t >= 0.0)) throw DomainError("integration time must be >= 0");
  if (!(h > 0.0)) throw DomainError("step size must be > 0");
  const int d = sys.dimension();
  const auto du = static_cast<std::size_t>(d);
  const VectorField& f = sys.field(regime);

  // Augmented state y = (x, J) with J' = DF(x) J, integrated with the same
  // RK4 tableau as the plain flow.
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> J(du * du, 0.0);
  for (std::size_t k = 0; k < du; ++k) J[k * du + k] = 1.0;

  std::vector<double> scratch(std::max<std::size_t>(1, f.scratch_need()));
  std::vector<double> xa(du), fx(du), dfx(du * du);
  std::vector<double> kx[4], kj[4];
  for (auto& v : kx) v.resize(du);
  for (auto& v : kj) v.resize(du * du);
  std::vector<double> xs(du), Js(du * du);

  auto deriv = [&](const std::vector<double>& xc, const std::vector<double>& Jc,
                   std::vector<double>& dx, std::vector<double>& dJ) {
    f.value(xc, dx, scratch.data());
    f.jacobian(xc, dfx);
    for (std::size_t i = 0; i < du; ++i)
      for (std::size_t j = 0; j < du; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < du; ++k) s += dfx[i * du + k] * Jc[k * du + j];
        dJ[i * du + j] = s;
      }
  };

  auto step = [&](double hs) {
    deriv(x, J, kx[0], kj[0]);
    for (std::size_t k = 0; k < du; ++k) xs[k] = x[k] + 0.5 * hs * kx[0][k];
    for (std::size_t k = 0; k < du * du; ++k) Js[k] = J[k] + 0.5 * hs * kj[0][k];
    deriv(xs, Js, kx[1], kj[1]);
    for (std::size_t k = 0; k < du; ++k) xs[k] = x[k] + 0.5 * hs * kx[1][k];
    for (std::size_t k = 0; k < du * du; ++k) Js[k] = J[k] + 0.5 * hs * kj[1][k];
    deriv(xs, Js, kx[2], kj[2]);
    for (std::size_t k = 0; k < du; ++k) xs[k] = x[k] + hs * kx[2][k];
    for (std::size_t k = 0; k < du * du; ++k) Js[k] = J[k] + hs * kj[2][k];
    deriv(xs, Js, kx[3], kj[3]);
    for (std::size_t k = 0; k < du; ++k)
      x[k] += hs / 6.0 * (kx[0][k] + 2.0 * kx[1][k] + 2.0 * kx[2][k] + kx[3][k]);
    for (std::size_t k = 0; k < du * du; ++k)
      J[k] += hs / 6.0 * (kj[0][k] + 2.0 * kj[1][k] + 2.0 * kj[2][k] + kj[3][k]);
    sys.box().wrap_point(std::span<double>(x));
  };

  FlowResult res;
  const long full = static_cast<long>(t / h);
  for (long n = 0; n < full; ++n) {
    step(h);
    ++res.steps;
  }
  const double rest = t - static_cast<double>(full) * h;
  if (rest > 0.0) {
    step(rest);
    ++res.steps;
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Jm(
      J.data(), d, d);
  double det = Jm.determinant();
  if (std::abs(det) < 1e-12)
    throw SingularJacobian("variational Jacobian determinant " + std::to_string(det));

  res.endpoint = std::move(x);
  res.jacobian = std::move(J);
  return res;
}

PullbackFamily pullback_family(const SwitchingSystem& sys, std::span<const double> x0,
                               const JumpSequence& seq, PullbackVariant variant, double h) {
  seq.check();
  for (double u : seq.durations)
    if (!(u > 0.0)) throw DomainError("pullback_family needs strictly positive durations");

  const int d = sys.dimension();
  const int m = seq.legs();

  // Leg Jacobians J_l = D Phi^{i_{l-1}}_{u_l}(x_{l-1}) and prefix points x_l.
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  lu.reserve(static_cast<std::size_t>(m));
  std::vector<Point> points;
  points.emplace_back(x0.begin(), x0.end());
  for (int l = 0; l < m; ++l) {
    auto lu8 = static_cast<std::size_t>(l);
    auto leg = variational_integrate(sys, seq.indices[lu8], points.back(),
                                     seq.durations[lu8], h);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        Jm(leg.jacobian->data(), d, d);
    lu.emplace_back(Eigen::MatrixXd(Jm));
    points.push_back(leg.endpoint);
  }

  // Pullback of F^{i_k}(x_k) through legs k..1 (inverse Jacobians applied as
  // linear solves, innermost leg first).
  auto pulled = [&](int k) {
    Eigen::VectorXd v =
        Eigen::Map<const Eigen::VectorXd>(sys.field(seq.indices[static_cast<std::size_t>(k)])
                                              .value(points[static_cast<std::size_t>(k)])
                                              .data(),
                                          d);
    for (int l = k; l >= 1; --l) v = lu[static_cast<std::size_t>(l - 1)].solve(v);
    return Point(v.data(), v.data() + d);
  };

  PullbackFamily fam;
  fam.base.assign(x0.begin(), x0.end());
  fam.sequence = seq;
  fam.variant = variant;

  std::vector<Point> tilde;
  tilde.reserve(static_cast<std::size_t>(m + 1));
  for (int k = 0; k <= m; ++k) tilde.push_back(pulled(k));

  if (variant == PullbackVariant::tilde) {
    fam.vectors = std::move(tilde);
  } else {
    fam.vectors.reserve(static_cast<std::size_t>(m));
    const Point& last = tilde.back();
    for (int k = 0; k < m; ++k) {
      Point diff(static_cast<std::size_t>(d));
      for (int c = 0; c < d; ++c)
        diff[static_cast<std::size_t>(c)] =
            tilde[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] -
            last[static_cast<std::size_t>(c)];
      fam.vectors.push_back(std::move(diff));
    }
  }
  return fam;
}

RankResult matrix_rank(const std::vector<Point>& columns, int dimension, double tol) {
  RankResult out;
  if (columns.empty()) return out;
  Eigen::MatrixXd m(dimension, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (int r = 0; r < dimension; ++r)
      m(r, static_cast<Eigen::Index>(c)) = columns[c][static_cast<std::size_t>(r)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff = out.singular_values.empty() ? 0.0 : tol * out.singular_values.front();
  for (double s : out.singular_values)
    if (s > cutoff) ++out.rank;
  return out;
}

RankResult submersion_rank(const PullbackFamily& family, double tol) {
  if (family.vectors.empty()) throw DomainError("submersion_rank: empty family");
  return matrix_rank(family.vectors, static_cast<int>(family.base.size()), tol);
}

}  // namespace pdmp::flow
