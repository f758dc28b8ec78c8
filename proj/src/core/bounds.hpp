#pragma once

#include <cstdint>
#include <vector>

#include "core/dataset.hpp"
#include "core/moments.hpp"
#include "core/solver.hpp"

namespace mba {

struct BoundInputs {
  std::size_t d = 0;
  double r_x = 1.0;        // data norm bound, |x|_2^2 <= R_x
  double r_w = 1.0;        // weight norm bound
  double sigma_norm = 1.0; // |Sigma_N|_2
  double epsilon = 0.1;    // objective gap
  double p = 0.05;         // failure probability

  void validate() const;
};

enum class BernsteinCase { Matrix, Scalar };

// The two branches of the sample-size bound before the max/ceiling; exposed so
// their closed-form structure (log d growth, 1/eps^2 scaling) is testable.
double required_samples_matrix_branch(const BoundInputs& b);
double required_samples_scalar_branch(const BoundInputs& b);

// S = ceil(max(matrix branch, scalar branch)); errors on non-finite overflow.
std::uint64_t required_samples(const BoundInputs& b);

// Exponential tail bound on P(|Delta| > gamma) at sample size S, clipped to
// [0,1]. Matrix case carries the 2d dimensional factor.
double bernstein_tail(double gamma, std::uint64_t s, const BoundInputs& b, BernsteinCase which);

// One sampled fit compared against the full-pair reference solution.
struct ConcentrationRecord {
  std::uint64_t s = 0;
  std::uint32_t trial = 0;
  double delta_sigma_norm = 0.0;  // |Sigma_S - Sigma_N|_2
  double delta_mu_norm = 0.0;     // |mu_S - mu_N|_2
  double w_gap = 0.0;             // |w_N - w_S|_2
  double objective_gap = 0.0;     // L_N(w_S) - L_N(w_N) >= 0
  double delta_bound = 0.0;       // Delta(w_N) - Delta(w_S), the sandwich majorant
  double w_s_sq_norm = 0.0;       // |w_S|_2^2
  double r_w_implied = 0.0;       // (|mu_S|_2 / lambda2)^2
};

struct ConcentrationSummary {
  std::uint64_t s = 0;
  double median_w_gap = 0.0;
  double p90_w_gap = 0.0;
  double median_delta_sigma = 0.0;
  double p90_delta_sigma = 0.0;
  double median_delta_mu = 0.0;
  double median_objective_gap = 0.0;
};

// For each S in s_grid, runs `trials` independent sampled fits against the
// exact full-pair solution and records the concentration quantities. When an
// S equals N+ N- the full pair ensemble is enumerated instead of sampled.
// Trials use derived seeds and may run on up to n_workers threads; output
// order is (grid, trial)-indexed either way.
std::vector<ConcentrationRecord> measure_concentration(const LabeledDataset& ds,
                                                       const RegularizationSpec& reg,
                                                       const std::vector<std::uint64_t>& s_grid,
                                                       std::uint32_t trials, std::uint64_t seed,
                                                       unsigned n_workers = 0);

std::vector<ConcentrationSummary> summarize_concentration(
    const std::vector<ConcentrationRecord>& records);

// |Sigma|_2 of an accumulator by power iteration (dense eigendecomposition is
// wasteful at the dimension cap).
double sigma_spectral_norm(const MomentAccumulator& acc, double rel_tol = 1e-9);

}  // namespace mba
