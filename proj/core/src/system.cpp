#include "pdmp/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdmp/flow.hpp"

namespace pdmp {

bool Box::contains(std::span<const double> x, double margin) const {
  for (int k = 0; k < dimension(); ++k) {
    if (wraps(k)) continue;
    auto ku = static_cast<std::size_t>(k);
    if (x[ku] < lo[ku] - margin || x[ku] > hi[ku] + margin) return false;
  }
  return true;
}

void Box::wrap_point(std::span<double> x) const {
  if (wrap.empty()) return;
  for (int k = 0; k < dimension(); ++k) {
    if (!wraps(k)) continue;
    auto ku = static_cast<std::size_t>(k);
    double w = extent(k);
    double y = std::fmod(x[ku] - lo[ku], w);
    if (y < 0.0) y += w;
    x[ku] = lo[ku] + y;
  }
}

std::vector<Point> Box::probe_grid(int per_axis, std::size_t max_points) const {
  const int d = dimension();
  // Shrink the per-axis count until the grid fits the cap.
  std::size_t total;
  for (;;) {
    total = 1;
    bool overflow = false;
    for (int k = 0; k < d; ++k) {
      total *= static_cast<std::size_t>(per_axis);
      if (total > max_points) {
        overflow = true;
        break;
      }
    }
    if (!overflow || per_axis <= 2) break;
    --per_axis;
  }

  std::vector<Point> pts;
  pts.reserve(total + (1u << std::min(d, 16)));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point p(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      p[ku] = per_axis == 1 ? 0.5 * (lo[ku] + hi[ku])
                            : lo[ku] + extent(k) * idx[ku] / (per_axis - 1);
    }
    pts.push_back(std::move(p));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      if (++idx[ku] < per_axis) break;
      idx[ku] = 0;
    }
  }
  if (d <= 16) {
    for (std::size_t mask = 0; mask < (1u << d); ++mask) {
      Point p(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k)
        p[static_cast<std::size_t>(k)] =
            (mask >> k) & 1 ? hi[static_cast<std::size_t>(k)] : lo[static_cast<std::size_t>(k)];
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

VectorField::VectorField(std::vector<expr::Expression> components)
    : components_(std::move(components)) {
  dim_ = static_cast<int>(components_.size());
  partials_.reserve(static_cast<std::size_t>(dim_ * dim_));
  for (int i = 0; i < dim_; ++i) {
    if (components_[static_cast<std::size_t>(i)].dimension() != dim_)
      throw DomainError("field component dimension mismatch");
    for (int j = 1; j <= dim_; ++j)
      partials_.push_back(components_[static_cast<std::size_t>(i)].differentiate(j));
  }
  for (const auto& c : components_) scratch_need_ = std::max(scratch_need_, c.stack_need());
}

VectorField::VectorField(int dimension, Callable f, JacobianCallable jac)
    : dim_(dimension), callable_(std::move(f)), jac_callable_(std::move(jac)) {
  scratch_need_ = 1;
}

void VectorField::value(std::span<const double> x, std::span<double> out,
                        double* scratch) const {
  if (symbolic()) {
    for (int i = 0; i < dim_; ++i)
      out[static_cast<std::size_t>(i)] = components_[static_cast<std::size_t>(i)].run(x, scratch);
  } else {
    callable_(x, out);
  }
}

Point VectorField::value(std::span<const double> x) const {
  Point out(static_cast<std::size_t>(dim_));
  std::vector<double> scratch(std::max<std::size_t>(scratch_need_, 1));
  value(x, out, scratch.data());
  return out;
}

void VectorField::jacobian(std::span<const double> x, std::span<double> out) const {
  const auto d = static_cast<std::size_t>(dim_);
  if (symbolic()) {
    std::vector<double> scratch(std::max<std::size_t>(1, scratch_need_));
    std::size_t sneed = 0;
    for (const auto& p : partials_) sneed = std::max(sneed, p.stack_need());
    if (sneed > scratch.size()) scratch.resize(sneed);
    for (std::size_t ij = 0; ij < d * d; ++ij) out[ij] = partials_[ij].run(x, scratch.data());
    return;
  }
  if (jac_callable_) {
    jac_callable_(x, out);
    return;
  }
  // Central differences, step 1e-5 * (1 + |x|).
  double norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) norm += x[k] * x[k];
  const double h = 1e-5 * (1.0 + std::sqrt(norm));
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  std::vector<double> fp(d), fm(d);
  for (std::size_t j = 0; j < d; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    callable_(xp, fp);
    callable_(xm, fm);
    for (std::size_t i = 0; i < d; ++i) out[i * d + j] = (fp[i] - fm[i]) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
}

const expr::Expression& VectorField::partial(int i, int j) const {
  if (!symbolic()) throw DomainError("partial(): field has no symbolic components");
  return partials_[static_cast<std::size_t>(i * dim_ + j)];
}

void JumpSequence::check() const {
  if (indices.size() != durations.size() + 1)
    throw InvariantViolation("jump sequence needs n+1 indices for n durations");
  for (double u : durations)
    if (!(u >= 0.0)) throw InvariantViolation("jump sequence durations must be >= 0");
}

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) {
    os << "\n  - " << v.message;
    if (!v.at.empty()) {
      os << " at (";
      for (std::size_t k = 0; k < v.at.size(); ++k) os << (k ? ", " : "") << v.at[k];
      os << ")";
    }
  }
  return os.str();
}

SwitchingSystem::SwitchingSystem(int dimension, int regimes, std::vector<VectorField> fields,
                                 std::vector<expr::Expression> rates, double lambda_bar,
                                 Box box)
    : dim_(dimension),
      regimes_(regimes),
      fields_(std::move(fields)),
      rates_(std::move(rates)),
      lambda_bar_(lambda_bar),
      box_(std::move(box)) {
  if (regimes_ < 2) throw InvariantViolation("need at least 2 regimes");
  if (static_cast<int>(fields_.size()) != regimes_)
    throw InvariantViolation("need one vector field per regime");
  if (rates_.size() != static_cast<std::size_t>(regimes_ * regimes_))
    throw InvariantViolation("need a full regimes x regimes rate table");
  if (!(lambda_bar_ > 0.0)) throw InvariantViolation("lambda_bar must be positive");
  if (box_.dimension() != dim_) throw InvariantViolation("box dimension mismatch");
  for (const auto& f : fields_)
    if (f.dimension() != dim_) throw InvariantViolation("field dimension mismatch");

  probes_ = box_.probe_grid();
  std::vector<double> fx(static_cast<std::size_t>(dim_));
  for (const auto& p : probes_) {
    for (int i = 0; i < regimes_; ++i) {
      try {
        std::vector<double> scratch(std::max<std::size_t>(1, field(i).scratch_need()));
        field(i).value(p, fx, scratch.data());
      } catch (const DomainError&) {
        continue;  // reported by validate()
      }
      double n2 = 0.0;
      for (double v : fx) n2 += v * v;
      speed_bound_ = std::max(speed_bound_, std::sqrt(n2));
    }
  }
}

double SwitchingSystem::rate(std::span<const double> x, int i, int j) const {
  if (i == j) return 0.0;
  return rates_[static_cast<std::size_t>(i * regimes_ + j)].evaluate(x);
}

std::vector<double> SwitchingSystem::q_matrix(std::span<const double> x) const {
  const auto n = static_cast<std::size_t>(regimes_);
  std::vector<double> q(n * n, 0.0);
  for (int i = 0; i < regimes_; ++i) {
    double row = 0.0;
    for (int j = 0; j < regimes_; ++j) {
      if (i == j) continue;
      double r = rate(x, i, j);
      if (r < 0.0) throw InvariantViolation("negative jump rate");
      q[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = r / lambda_bar_;
      row += r;
    }
    if (!(row < lambda_bar_))
      throw InvariantViolation("rate row sum " + std::to_string(row) +
                               " is not strictly below lambda_bar");
    q[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(i)] = 1.0 - row / lambda_bar_;
  }
  return q;
}

namespace {

// Strong connectivity of the positivity graph of the rates at x.
bool strongly_connected(const std::vector<bool>& edge, int n) {
  auto reach_all = [&](int start, bool forward) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        bool has = forward ? edge[static_cast<std::size_t>(u * n + v)]
                           : edge[static_cast<std::size_t>(v * n + u)];
        if (has && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          stack.push_back(v);
          ++count;
        }
      }
    }
    return count == n;
  };
  return reach_all(0, true) && reach_all(0, false);
}

}  // namespace

ValidationReport SwitchingSystem::validate() const {
  ValidationReport report;
  auto add = [&](const std::string& msg, const Point& at) {
    if (report.violations.size() < 64) report.violations.push_back({msg, at});
  };

  std::vector<double> fx(static_cast<std::size_t>(dim_));
  std::vector<double> jac(static_cast<std::size_t>(dim_ * dim_));
  for (const auto& p : probes_) {
    // Fields and their first derivatives must be finite on the box.
    for (int i = 0; i < regimes_; ++i) {
      try {
        std::vector<double> scratch(std::max<std::size_t>(1, field(i).scratch_need()));
        field(i).value(p, fx, scratch.data());
        field(i).jacobian(p, jac);
        for (double v : jac)
          if (!std::isfinite(v)) throw DomainError("non-finite derivative");
      } catch (const DomainError& e) {
        add("field " + std::to_string(i) + ": " + e.what(), p);
        continue;
      }
    }

    std::vector<bool> edge(static_cast<std::size_t>(regimes_ * regimes_), false);
    for (int i = 0; i < regimes_; ++i) {
      double row = 0.0;
      for (int j = 0; j < regimes_; ++j) {
        if (i == j) continue;
        double r;
        try {
          r = rate(p, i, j);
        } catch (const DomainError& e) {
          add("rate(" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what(), p);
          continue;
        }
        if (!std::isfinite(r)) {
          add("non-finite rate (" + std::to_string(i) + "," + std::to_string(j) + ")", p);
          continue;
        }
        if (r < 0.0)
          add("negative rate (" + std::to_string(i) + "," + std::to_string(j) + ")", p);
        if (r > 0.0) edge[static_cast<std::size_t>(i * regimes_ + j)] = true;
        row += r;
      }
      if (!(row < lambda_bar_))
        add("rate row sum " + std::to_string(row) + " for regime " + std::to_string(i) +
                " not strictly below lambda_bar " + std::to_string(lambda_bar_),
            p);
    }
    if (!strongly_connected(edge, regimes_)) add("rate matrix not irreducible", p);
    if (report.violations.size() >= 64) break;
  }

  if (!std::isfinite(speed_bound_)) add("speed bound not finite", {});
  return report;
}

double SwitchingSystem::suggest_lambda_bar() const {
  double max_row = 0.0;
  for (const auto& p : probes_) {
    for (int i = 0; i < regimes_; ++i) {
      double row = 0.0;
      for (int j = 0; j < regimes_; ++j)
        if (i != j) row += std::max(0.0, rate(p, i, j));
      max_row = std::max(max_row, row);
    }
  }
  return 1.2 * max_row;
}

double adapted_weight(const SwitchingSystem& sys, std::span<const double> x,
                      const JumpSequence& seq, double h) {
  seq.check();
  double weight = 1.0;
  Point pos(x.begin(), x.end());
  for (int k = 0; k < seq.legs(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    int from = seq.indices[ku];
    int to = seq.indices[ku + 1];
    pos = flow::integrate(sys, from, pos, seq.durations[ku], h).endpoint;
    auto q = sys.q_matrix(pos);
    weight *= q[static_cast<std::size_t>(from * sys.regimes() + to)];
    if (weight == 0.0) break;
  }
  return weight;
}

}  // namespace pdmp
