#include "core/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace mba {

namespace {

constexpr std::size_t kEigenCheckMaxDim = 2048;

void check_inputs(const MomentAccumulator& acc, const RegularizationSpec& reg) {
  if (acc.count() < 1) fail(ErrorKind::InvalidArgument, "accumulator holds no pairs");
  if (acc.dim() == 0) fail(ErrorKind::InvalidArgument, "accumulator has dimension zero");
  if (reg.lambda1 < 0.0 || reg.lambda2 < 0.0)
    fail(ErrorKind::InvalidArgument, "regularization weights must be nonnegative");
}

// Cheap corruption guard: a negative diagonal entry certifies an indefinite
// sigma (min eigenvalue <= min diagonal).
void check_diagonal(const PackedSymmetric& sigma) {
  const double scale = std::max(sigma.max_abs(), 1e-300);
  for (std::size_t i = 0; i < sigma.dim(); ++i)
    if (sigma.at(i, i) < -1e-6 * scale)
      fail(ErrorKind::Numeric, "sigma has negative diagonal entry " +
                                   std::to_string(sigma.at(i, i)) + " at coordinate " +
                                   std::to_string(i) + "; accumulator is corrupted");
}

double inf_norm(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

double kkt_from_gradient(const std::vector<double>& w, const Eigen::VectorXd& grad,
                         const RegularizationSpec& reg) {
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad[static_cast<Eigen::Index>(i)] + reg.lambda2 * w[i];
    double r;
    if (w[i] != 0.0)
      r = std::abs(g + reg.lambda1 * (w[i] > 0.0 ? 1.0 : -1.0));
    else
      r = std::max(std::abs(g) - reg.lambda1, 0.0);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

double objective(const std::vector<double>& w, const MomentAccumulator& acc,
                 const RegularizationSpec& reg) {
  if (w.size() != acc.dim()) fail(ErrorKind::Dimension, "weight/accumulator dimension mismatch");
  std::vector<double> sw(w.size());
  acc.sigma().matvec(w.data(), sw.data());
  double quad = 0.0, lin = 0.0, l1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    quad += w[i] * sw[i];
    lin += w[i] * acc.mu()[i];
    l1 += std::abs(w[i]);
    l2 += w[i] * w[i];
  }
  return 0.5 * quad - lin + reg.lambda1 * l1 + 0.5 * reg.lambda2 * l2;
}

double kkt_residual(const std::vector<double>& w, const MomentAccumulator& acc,
                    const RegularizationSpec& reg) {
  if (w.size() != acc.dim()) fail(ErrorKind::Dimension, "weight/accumulator dimension mismatch");
  std::vector<double> sw(w.size());
  acc.sigma().matvec(w.data(), sw.data());
  Eigen::VectorXd grad(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    grad[static_cast<Eigen::Index>(i)] = sw[i] - acc.mu()[i];
  return kkt_from_gradient(w, grad, reg);
}

RankerModel solve(const MomentAccumulator& acc, const RegularizationSpec& reg,
                  const SolverOptions& opts) {
  check_inputs(acc, reg);
  check_diagonal(acc.sigma());
  const std::size_t d = acc.dim();
  const auto n = static_cast<Eigen::Index>(d);

  Eigen::MatrixXd sigma = acc.sigma().to_dense();
  Eigen::Map<const Eigen::VectorXd> mu(acc.mu().data(), n);

  if (reg.lambda2 == 0.0) {
    // Uniqueness requires a (numerically) positive definite sigma; for a PSD
    // matrix nonsingular and positive definite coincide.
    if (d > kEigenCheckMaxDim && !opts.allow_pseudo)
      fail(ErrorKind::Numeric,
           "lambda2 = 0 requires a positive-definiteness check, too costly beyond d = " +
               std::to_string(kEigenCheckMaxDim) + "; set lambda2 > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigendecomposition failed");
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -1e-6 * std::max(max_eig, 1e-300))
      fail(ErrorKind::Numeric, "sigma is indefinite (min eigenvalue " +
                                   std::to_string(min_eig) + "); accumulator is corrupted");
    const bool positive_definite = min_eig > 1e-12 * std::max(max_eig, 1.0);
    if (!positive_definite) {
      if (reg.lambda1 == 0.0 && opts.allow_pseudo) {
        // Research escape hatch: minimum-norm solution of Sigma w = mu.
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        const double cut = 1e-12 * std::max(max_eig, 1.0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const double lam = eig.eigenvalues()[k];
          if (lam > cut) {
            const double coeff = eig.eigenvectors().col(k).dot(mu) / lam;
            w += coeff * eig.eigenvectors().col(k);
          }
        }
        RankerModel model;
        model.w.assign(w.data(), w.data() + n);
        model.reg = reg;
        model.pairs_seen = acc.count();
        model.method = "pseudo_inverse";
        model.iters = 0;
        model.residual = kkt_residual(model.w, acc, reg);
        model.objective_value = objective(model.w, acc, reg);
        return model;
      }
      fail(ErrorKind::Numeric,
           "sigma is singular and lambda2 = 0: minimizer is not unique (set lambda2 > 0, or "
           "allow_pseudo for the minimum-norm solution when lambda1 = 0)");
    }
  }

  std::vector<double> w(d, 0.0);
  if (!opts.init_w.empty()) {
    if (opts.init_w.size() != d) fail(ErrorKind::Dimension, "init_w dimension mismatch");
    w = opts.init_w;
  }

  // Cached s = Sigma w, refreshed periodically to shed drift.
  Eigen::VectorXd wvec = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
  Eigen::VectorXd s = sigma * wvec;

  const std::uint64_t refresh_every = 64;
  double kkt = std::numeric_limits<double>::infinity();
  std::uint64_t sweep = 0;
  bool converged = false;

  while (sweep < opts.max_sweeps) {
    ++sweep;
    double max_delta = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double aii = sigma(ii, ii) + reg.lambda2;
      const double b = s[ii] - sigma(ii, ii) * w[i] - mu[ii];
      double next;
      if (aii > 0.0) {
        const double mag = std::abs(b) - reg.lambda1;
        next = mag > 0.0 ? -(b > 0.0 ? mag : -mag) / aii : 0.0;
      } else if (std::abs(b) <= reg.lambda1) {
        next = 0.0;
      } else {
        fail(ErrorKind::Numeric, "coordinate " + std::to_string(i) +
                                     " has zero curvature and nonzero gradient; objective is "
                                     "unbounded below");
      }
      const double delta = next - w[i];
      if (delta != 0.0) {
        s.noalias() += delta * sigma.col(ii);
        w[i] = next;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }

    if (sweep % refresh_every == 0) {
      wvec = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
      s.noalias() = sigma * wvec;
    }

    if (max_delta <= opts.coord_tol * std::max(1.0, inf_norm(w))) {
      // Candidate stop; verify the subgradient condition on a fresh product.
      wvec = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
      s.noalias() = sigma * wvec;
      kkt = kkt_from_gradient(w, s - mu, reg);
      if (kkt <= opts.kkt_tol) {
        converged = true;
        break;
      }
    }
  }

  if (!converged) {
    wvec = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    s.noalias() = sigma * wvec;
    kkt = kkt_from_gradient(w, s - mu, reg);
    throw SolveError("coordinate descent did not converge in " + std::to_string(sweep) +
                         " sweeps (KKT residual " + std::to_string(kkt) + ")",
                     w, kkt, sweep);
  }

  RankerModel model;
  model.w = std::move(w);
  model.reg = reg;
  model.pairs_seen = acc.count();
  model.method = "coordinate_descent";
  model.iters = sweep;
  model.residual = kkt;
  model.objective_value = objective(model.w, acc, reg);
  return model;
}

RankerModel solve_ridge_direct(const MomentAccumulator& acc, double lambda2) {
  check_inputs(acc, RegularizationSpec{0.0, lambda2});
  if (lambda2 <= 0.0) fail(ErrorKind::InvalidArgument, "ridge path requires lambda2 > 0");
  check_diagonal(acc.sigma());
  const auto n = static_cast<Eigen::Index>(acc.dim());

  Eigen::MatrixXd system = acc.sigma().to_dense();
  system.diagonal().array() += lambda2;
  Eigen::Map<const Eigen::VectorXd> mu(acc.mu().data(), n);

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::Numeric, "Cholesky factorization failed; sigma + lambda2 I is not positive "
                             "definite (accumulator is corrupted)");
  Eigen::VectorXd w = llt.solve(mu);

  RankerModel model;
  model.w.assign(w.data(), w.data() + n);
  model.reg = RegularizationSpec{0.0, lambda2};
  model.pairs_seen = acc.count();
  model.method = "ridge_direct";
  model.iters = 1;
  model.residual = kkt_residual(model.w, acc, model.reg);
  model.objective_value = objective(model.w, acc, model.reg);
  return model;
}

}  // namespace mba
