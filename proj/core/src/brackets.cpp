#include "pdmp/brackets.hpp"

#include <cmath>
#include <set>

namespace pdmp::brackets {

namespace {

VectorField symbolic_bracket(const VectorField& f, const VectorField& g) {
  // Components are built as (sum DG F) - (sum DF G); the two sums have the
  // same shape for [F,G] and [G,F], which makes antisymmetry exact in
  // floating point, not just up to rounding.
  const int d = f.dimension();
  std::vector<expr::Expression> comps;
  comps.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    expr::Expression dg_f = expr::constant(0.0, d);
    expr::Expression df_g = expr::constant(0.0, d);
    for (int j = 0; j < d; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      dg_f = dg_f + g.partial(i, j) * f.components()[ju];
      df_g = df_g + f.partial(i, j) * g.components()[ju];
    }
    comps.push_back(dg_f - df_g);
  }
  return VectorField(std::move(comps));
}

VectorField numeric_bracket(const VectorField& f, const VectorField& g) {
  const int d = f.dimension();
  auto eval = [f, g, d](std::span<const double> x, std::span<double> out) {
    constexpr double kStep = 1e-4;
    const auto du = static_cast<std::size_t>(d);
    std::vector<double> fx = f.value(x);
    std::vector<double> gx = g.value(x);
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    std::vector<double> df(du * du), dg(du * du), p(du), m(du);
    for (std::size_t j = 0; j < du; ++j) {
      xp[j] = x[j] + kStep;
      xm[j] = x[j] - kStep;
      auto fill = [&](const VectorField& field, std::vector<double>& jac) {
        std::vector<double> scratch(std::max<std::size_t>(1, field.scratch_need()));
        field.value(xp, p, scratch.data());
        field.value(xm, m, scratch.data());
        for (std::size_t i = 0; i < du; ++i) jac[i * du + j] = (p[i] - m[i]) / (2.0 * kStep);
      };
      fill(f, df);
      fill(g, dg);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    for (std::size_t i = 0; i < du; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < du; ++j) s += dg[i * du + j] * fx[j] - df[i * du + j] * gx[j];
      out[i] = s;
    }
  };
  return VectorField(d, eval);
}

bool is_zero_field(const VectorField& f) {
  if (!f.symbolic()) return false;
  for (const auto& c : f.components())
    if (!c.is_constant_zero()) return false;
  return true;
}

std::string field_key(const VectorField& f) {
  std::string key;
  for (const auto& c : f.components()) {
    key += c.print();
    key += '|';
  }
  return key;
}

VectorField subtract(const VectorField& f, const VectorField& g) {
  const int d = f.dimension();
  if (f.symbolic() && g.symbolic()) {
    std::vector<expr::Expression> comps;
    for (int i = 0; i < d; ++i)
      comps.push_back(f.components()[static_cast<std::size_t>(i)] -
                      g.components()[static_cast<std::size_t>(i)]);
    return VectorField(std::move(comps));
  }
  auto eval = [f, g, d](std::span<const double> x, std::span<double> out) {
    auto fv = f.value(x);
    auto gv = g.value(x);
    for (int i = 0; i < d; ++i)
      out[static_cast<std::size_t>(i)] =
          fv[static_cast<std::size_t>(i)] - gv[static_cast<std::size_t>(i)];
  };
  return VectorField(d, eval);
}

Family build_family(const SwitchingSystem& sys, ConditionKind kind, int k_max,
                    std::size_t cap) {
  if (k_max < 0) throw DomainError("k_max must be >= 0");
  Family fam;
  fam.kind = kind;
  bool all_symbolic = true;
  for (int i = 0; i < sys.regimes(); ++i)
    if (!sys.field(i).symbolic()) all_symbolic = false;
  fam.numeric_fallback = !all_symbolic;

  std::set<std::string> seen;
  std::size_t total = 0;
  auto insert = [&](std::vector<FamilyMember>& level, VectorField field, int order) {
    if (is_zero_field(field)) return;
    if (field.symbolic()) {
      auto key = field_key(field);
      if (!seen.insert(key).second) return;
    }
    if (++total > cap)
      throw FamilyExplosion("bracket family exceeded " + std::to_string(cap) + " fields");
    level.push_back({std::move(field), order});
  };

  fam.by_order.emplace_back();
  if (kind == ConditionKind::weak) {
    for (int i = 0; i < sys.regimes(); ++i)
      insert(fam.by_order[0], sys.field(i), 0);
  } else {
    for (int i = 0; i < sys.regimes(); ++i)
      for (int j = 0; j < sys.regimes(); ++j)
        if (i != j) insert(fam.by_order[0], subtract(sys.field(i), sys.field(j)), 0);
  }

  for (int k = 1; k <= k_max; ++k) {
    fam.by_order.emplace_back();
    auto& level = fam.by_order.back();
    const auto& prev = fam.by_order[static_cast<std::size_t>(k - 1)];
    for (int i = 0; i < sys.regimes(); ++i)
      for (const auto& member : prev)
        insert(level, lie_bracket(sys.field(i), member.field), k);
    if (level.empty()) break;  // no new fields can appear later either
  }
  return fam;
}

}  // namespace

VectorField lie_bracket(const VectorField& f, const VectorField& g) {
  if (f.dimension() != g.dimension())
    throw DomainError("lie_bracket: dimension mismatch");
  if (f.symbolic() && g.symbolic()) return symbolic_bracket(f, g);
  return numeric_bracket(f, g);
}

std::vector<std::size_t> Family::sizes() const {
  std::vector<std::size_t> out;
  std::size_t acc = 0;
  for (const auto& level : by_order) {
    acc += level.size();
    out.push_back(acc);
  }
  return out;
}

Family weak_family(const SwitchingSystem& sys, int k_max, std::size_t cap) {
  return build_family(sys, ConditionKind::weak, k_max, cap);
}

Family strong_family(const SwitchingSystem& sys, int k_max, std::size_t cap) {
  return build_family(sys, ConditionKind::strong, k_max, cap);
}

BracketReport check_condition(const Family& family, const SwitchingSystem& sys,
                              std::span<const double> x, double tol) {
  const int d = sys.dimension();
  BracketReport report;
  report.x.assign(x.begin(), x.end());
  report.kind = family.kind;
  report.k_max = static_cast<int>(family.by_order.size()) - 1;

  std::vector<Point> vectors;
  for (std::size_t k = 0; k < family.by_order.size(); ++k) {
    for (const auto& member : family.by_order[k]) vectors.push_back(member.field.value(x));
    report.family_size_per_order.push_back(vectors.size());
    auto rank = flow::matrix_rank(vectors, d, tol);
    report.rank_per_order.push_back(rank.rank);
    report.singular_values = rank.singular_values;
    if (rank.rank == d) {
      report.satisfied = true;
      report.order_achieved = static_cast<int>(k);
      break;
    }
  }
  report.low_confidence = family.numeric_fallback && report.rank_per_order.size() > 3;
  return report;
}

BracketReport check_condition(const SwitchingSystem& sys, std::span<const double> x,
                              ConditionKind kind, int k_max, double tol, std::size_t cap) {
  auto fam = build_family(sys, kind, k_max, cap);
  return check_condition(fam, sys, x, tol);
}

std::vector<VerdictRow> region_scan(const SwitchingSystem& sys, ConditionKind kind,
                                    int points_per_axis, int k_max, double tol) {
  auto fam = build_family(sys, kind, k_max, 512);

  // Cell-centred interior lattice, points_per_axis^d points.
  const int d = sys.dimension();
  const Box& box = sys.box();
  std::vector<Point> lattice;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(points_per_axis);
  for (std::size_t n = 0; n < total; ++n) {
    Point p(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      p[ku] = box.lo[ku] + box.extent(k) * (idx[ku] + 0.5) / points_per_axis;
    }
    lattice.push_back(std::move(p));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      if (++idx[ku] < points_per_axis) break;
      idx[ku] = 0;
    }
  }

  std::vector<VerdictRow> rows;
  for (const auto& p : lattice) {
    auto rep = check_condition(fam, sys, p, tol);
    VerdictRow row;
    row.x = p;
    row.kind = kind;
    row.order_achieved = rep.order_achieved;
    row.rank = rep.rank_per_order.empty() ? 0 : rep.rank_per_order.back();
    row.satisfied = rep.satisfied;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pdmp::brackets
