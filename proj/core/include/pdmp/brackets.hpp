#ifndef PDMP_BRACKETS_HPP
#define PDMP_BRACKETS_HPP

#include <string>
#include <vector>

#include "pdmp/flow.hpp"
#include "pdmp/system.hpp"

namespace pdmp::brackets {

// [F, G](x) = DG(x) F(x) - DF(x) G(x). Symbolic in, symbolic out when both
// fields are expression-based; otherwise a programmatic field computed with
// nested central differences (step 1e-4 per level).
VectorField lie_bracket(const VectorField& f, const VectorField& g);

enum class ConditionKind { weak, strong };

struct FamilyMember {
  VectorField field;
  int order = 0;
};

// Bracket families by order. Weak: F_0 = {F^i}, F_k = F_{k-1} + brackets
// [F^i, V]. Strong: G_0 = {F^i - F^j, i != j}, enriched the same way.
// Identically-zero fields are dropped and syntactically identical expression
// fields are deduplicated; exceeding `cap` members throws FamilyExplosion.
struct Family {
  ConditionKind kind = ConditionKind::weak;
  std::vector<std::vector<FamilyMember>> by_order;  // new members per order
  bool numeric_fallback = false;  // built via finite differences

  std::vector<std::size_t> sizes() const;  // cumulative per order
};

Family weak_family(const SwitchingSystem& sys, int k_max, std::size_t cap = 512);
Family strong_family(const SwitchingSystem& sys, int k_max, std::size_t cap = 512);

struct BracketReport {
  Point x;
  ConditionKind kind = ConditionKind::weak;
  int k_max = 0;
  std::vector<int> rank_per_order;
  std::vector<std::size_t> family_size_per_order;
  std::vector<double> singular_values;  // at the last evaluated order
  bool satisfied = false;
  int order_achieved = -1;
  bool low_confidence = false;  // numeric fallback beyond order 2
};

// Rank of the family vectors at x per order; early exit at full rank.
BracketReport check_condition(const Family& family, const SwitchingSystem& sys,
                              std::span<const double> x, double tol = 1e-8);
BracketReport check_condition(const SwitchingSystem& sys, std::span<const double> x,
                              ConditionKind kind, int k_max = 4, double tol = 1e-8,
                              std::size_t cap = 512);

// Verdict map over a uniform grid (used by the CLI to emit CSV).
struct VerdictRow {
  Point x;
  ConditionKind kind = ConditionKind::weak;
  int order_achieved = -1;
  int rank = 0;
  bool satisfied = false;
};
std::vector<VerdictRow> region_scan(const SwitchingSystem& sys, ConditionKind kind,
                                    int points_per_axis, int k_max = 4, double tol = 1e-8);

}  // namespace pdmp::brackets

#endif  // PDMP_BRACKETS_HPP
