#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/solver.hpp"

namespace mba {

struct AucReport {
  double auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double tie_mass = 0.0;  // fraction of pairs counted at 1/2
};

// Ordered (false_alarm, detection) points from (0,0) to (1,1); tie groups
// advance diagonally so the trapezoid area equals the tie-rule AUC.
struct RocCurve {
  std::vector<std::pair<double, double>> points;
  double area() const;
};

struct TTestResult {
  double t_stat = 0.0;
  std::size_t dof = 0;
  bool significant_95 = false;
  enum class Direction { Better, Worse, Tie } direction = Direction::Tie;
  bool infinite_t = false;  // zero variance with nonzero mean difference
};

// AUC = [#(s+ > s-) + (1/2) #(s+ = s-)] / (N+ N-), computed by a single sort
// (rank-sum form) with exact integer pair counting.
AucReport auc(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg);

RocCurve roc_curve(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg);

// Two-sided paired t-test at the 95% level on differences a - b;
// direction is from a's perspective (Better: a significantly above b).
TTestResult paired_ttest(const std::vector<double>& runs_a, const std::vector<double>& runs_b);

// Sparse linear scores w^T x for both classes.
std::pair<std::vector<double>, std::vector<double>> score(const RankerModel& model,
                                                          const LabeledDataset& ds);

// 0.975 quantile of Student's t with the given dof (table through 200, then
// the normal approximation).
double t_critical_975(std::size_t dof);

}  // namespace mba
