#pragma once

#include <cstdint>
#include <vector>

#include "core/dataset.hpp"
#include "core/solver.hpp"

namespace mba {

enum class StepSchedule { InvSqrt, Constant };
enum class PairwiseLoss { Psl, Phl };

struct SgdConfig {
  StepSchedule step_schedule = StepSchedule::InvSqrt;
  double c = 1.0;             // step size scale: eta_t = c / sqrt(t) or eta_t = c
  std::size_t epochs = 1;     // OLR passes over the shuffled stream
  std::size_t rounds = 0;     // pairwise rounds T; 0: ceil(n / batch)
  std::size_t batch = 64;     // pairs per round B
  double lambda2 = 0.0;
  std::uint64_t seed = 0;
};

// Per-example logistic gradient g(w) of log(1 + exp(-y w^T x)) + lambda2/2 |w|^2,
// written into grad (dense, caller-sized). Exposed for finite-difference checks.
void logistic_gradient(const std::vector<double>& w, const SparseExample& x, double y,
                       double lambda2, std::vector<double>& grad);

double logistic_loss(const std::vector<double>& w, const SparseExample& x, double y,
                     double lambda2);

// Pairwise surrogate subgradient wrt w at difference z = x+ - x-:
//   PSL: -2 (1 - w^T z) z,  PHL: -z on 1 - w^T z > 0, else 0.
// Returns the scalar factor applied to z.
double pairwise_subgradient_factor(PairwiseLoss loss, double score_diff);

double pairwise_loss_value(PairwiseLoss loss, double score_diff);

// Online logistic regression: SGD over a seed-shuffled stream.
// loss_trace, when given, receives the pre-update loss of each example.
RankerModel train_olr(const LabeledDataset& ds, const SgdConfig& config,
                      std::vector<double>* loss_trace = nullptr);

// Mini-batch pairwise gradient descent on PSL/PHL over zipped pairs drawn by
// the shared pair sampler. loss_trace receives per-round mean pre-update loss.
RankerModel train_mb_pairwise(const LabeledDataset& ds, const SgdConfig& config,
                              PairwiseLoss loss, std::vector<double>* loss_trace = nullptr);

}  // namespace mba
