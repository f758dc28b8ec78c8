#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/moments.hpp"

namespace mba {

struct RegularizationSpec {
  double lambda1 = 0.0;  // l1 weight
  double lambda2 = 0.0;  // l2 weight
};

struct SolverOptions {
  double kkt_tol = 1e-8;         // max subgradient residual at exit
  double coord_tol = 1e-8;       // max coordinate change, relative to max(1, |w|_inf)
  std::uint64_t max_sweeps = 10000;
  bool allow_pseudo = false;     // minimum-norm pseudo-solution for singular, unregularized sigma
  std::vector<double> init_w;    // empty: start from zero
};

// Linear ranker w plus the metadata needed to reproduce and audit the fit.
struct RankerModel {
  std::vector<double> w;
  RegularizationSpec reg;
  std::uint64_t pairs_seen = 0;
  std::uint64_t seed = 0;
  double objective_value = std::numeric_limits<double>::quiet_NaN();

  std::string method;  // coordinate_descent | ridge_direct | pseudo_inverse | olr | mb_psl | mb_phl
  // quadratic-solver diagnostics
  std::uint64_t iters = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  // gradient-baseline diagnostics
  std::string step_schedule;
  double step_c = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t rounds = 0;

  std::size_t dim() const { return w.size(); }
};

// Non-convergence carries the last iterate so callers can inspect or resume.
class SolveError : public Error {
 public:
  SolveError(std::string message, std::vector<double> last_iterate, double kkt_residual,
             std::uint64_t sweeps)
      : Error(ErrorKind::Numeric, std::move(message)),
        last_iterate_(std::move(last_iterate)),
        kkt_residual_(kkt_residual),
        sweeps_(sweeps) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double kkt_residual() const { return kkt_residual_; }
  std::uint64_t sweeps() const { return sweeps_; }

 private:
  std::vector<double> last_iterate_;
  double kkt_residual_;
  std::uint64_t sweeps_;
};

// L_S(w) = 1/2 w^T Sigma w - w^T mu + lambda1 |w|_1 + lambda2/2 |w|_2^2.
double objective(const std::vector<double>& w, const MomentAccumulator& acc,
                 const RegularizationSpec& reg);

// Cyclic coordinate descent with exact coordinate minimization
// (soft-thresholding); learning-rate free. Refuses configurations whose
// minimizer is not unique unless opts.allow_pseudo requests the minimum-norm
// pseudo-solution (lambda1 = lambda2 = 0 only).
RankerModel solve(const MomentAccumulator& acc, const RegularizationSpec& reg,
                  const SolverOptions& opts = {});

// Closed-form ridge path: (Sigma + lambda2 I) w = mu by Cholesky.
RankerModel solve_ridge_direct(const MomentAccumulator& acc, double lambda2);

// Max-norm KKT residual of w for the elastic-net objective over acc.
double kkt_residual(const std::vector<double>& w, const MomentAccumulator& acc,
                    const RegularizationSpec& reg);

}  // namespace mba
