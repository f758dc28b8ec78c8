#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "core/moments.hpp"
#include "core/solver.hpp"
#include "test_util.hpp"

using namespace mba;

namespace {

// Accumulator with prescribed dense moments (test-only back door).
MomentAccumulator make_acc(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                           std::uint64_t count = 1) {
  const auto d = static_cast<std::size_t>(mu.size());
  MomentAccumulator acc(d);
  for (std::size_t i = 0; i < d; ++i) acc.mu_mutable()[i] = mu[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      acc.sigma_mutable().upper(i, j) =
          sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  acc.set_count(count);
  return acc;
}

// Random symmetric PSD matrix A A^T / d plus optional ridge.
Eigen::MatrixXd random_psd(Rng& rng, std::size_t d, double jitter = 0.0) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 2.0 * rng.uniform01() - 1.0;
  Eigen::MatrixXd psd = a * a.transpose() / static_cast<double>(d);
  psd.diagonal().array() += jitter;
  return psd;
}

Eigen::VectorXd random_vec(Rng& rng, std::size_t d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 2.0 * rng.uniform01() - 1.0;
  return v;
}

double rel_err(const std::vector<double>& w, const Eigen::VectorXd& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double diff = w[i] - ref[static_cast<Eigen::Index>(i)];
    num += diff * diff;
    den += ref[static_cast<Eigen::Index>(i)] * ref[static_cast<Eigen::Index>(i)];
  }
  return std::sqrt(num) / std::max(1e-300, std::sqrt(den));
}

}  // namespace

TEST_CASE("identity sigma with ridge halves mu") {
  const auto acc = make_acc(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, -2.0));
  const auto model = solve(acc, RegularizationSpec{0.0, 1.0});
  CHECK(model.w[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(model.w[1] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(model.method == "coordinate_descent");
}

TEST_CASE("separable lasso soft-thresholds mu") {
  const auto acc = make_acc(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.1));
  const auto model = solve(acc, RegularizationSpec{0.5, 0.0});
  CHECK(model.w[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(model.w[1] == 0.0);
}

TEST_CASE("iterative solve matches a dense factorization oracle") {
  Rng rng(2718);
  const std::size_t d = 10;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd sigma = random_psd(rng, d);
    const Eigen::VectorXd mu = random_vec(rng, d);
    const double lambda2 = 0.1;
    const auto acc = make_acc(sigma, mu);
    const auto model = solve(acc, RegularizationSpec{0.0, lambda2});

    Eigen::MatrixXd system = sigma;
    system.diagonal().array() += lambda2;
    const Eigen::VectorXd ref = Eigen::LLT<Eigen::MatrixXd>(system).solve(mu);
    CHECK(rel_err(model.w, ref) <= 1e-6);
    CHECK(model.residual <= 1e-8);
  }
}

TEST_CASE("ridge fast path: zero sigma solves to mu / lambda2") {
  const auto acc = make_acc(Eigen::MatrixXd::Zero(3, 3), Eigen::Vector3d(2.0, -4.0, 6.0));
  const auto model = solve_ridge_direct(acc, 2.0);
  CHECK(model.w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.w[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(model.w[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ridge fast path agrees with the iterative solver") {
  Rng rng(31415);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 2 + rng.uniform_index(12);
    const auto acc = make_acc(random_psd(rng, d), random_vec(rng, d));
    const double lambda2 = 0.05 + rng.uniform01();
    const auto direct = solve_ridge_direct(acc, lambda2);
    const auto iterative = solve(acc, RegularizationSpec{0.0, lambda2});
    double gap = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      gap += (direct.w[i] - iterative.w[i]) * (direct.w[i] - iterative.w[i]);
      scale += direct.w[i] * direct.w[i];
    }
    CHECK(std::sqrt(gap) <= 1e-8 * std::max(1.0, std::sqrt(scale)));
  }
}

TEST_CASE("weight norm shrinks as lambda2 grows") {
  Rng rng(99);
  const auto acc = make_acc(random_psd(rng, 6), random_vec(rng, 6));
  double prev = std::numeric_limits<double>::infinity();
  for (const double lambda2 : {1.0, 10.0, 100.0}) {
    const auto model = solve_ridge_direct(acc, lambda2);
    double norm = 0.0;
    for (double v : model.w) norm += v * v;
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("objective basics and minimality") {
  Rng rng(123);
  const auto acc = make_acc(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.0));
  const RegularizationSpec none{0.0, 0.0};
  CHECK(objective({0.0, 0.0}, acc, none) == 0.0);
  CHECK(objective({1.0, 0.0}, acc, none) == doctest::Approx(-0.5).epsilon(1e-15));

  const auto psd_acc = make_acc(random_psd(rng, 8, 0.05), random_vec(rng, 8));
  const RegularizationSpec reg{0.01, 0.1};
  const auto model = solve(psd_acc, reg);
  const double at_min = objective(model.w, psd_acc, reg);
  CHECK(at_min == doctest::Approx(model.objective_value).epsilon(1e-10));
  for (int rep = 0; rep < 100; ++rep) {
    auto w = model.w;
    Eigen::VectorXd delta = random_vec(rng, 8);
    delta *= 1e-3 / delta.norm();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += delta[static_cast<Eigen::Index>(i)];
    CHECK(objective(w, psd_acc, reg) >= at_min - 1e-15);
  }
}

TEST_CASE("large lambda1 kills every coordinate exactly") {
  Rng rng(7);
  const auto acc = make_acc(random_psd(rng, 5), random_vec(rng, 5));
  double mu_inf = 0.0;
  for (double v : acc.mu()) mu_inf = std::max(mu_inf, std::abs(v));
  const auto model = solve(acc, RegularizationSpec{mu_inf, 0.1});
  for (double v : model.w) CHECK(v == 0.0);
}

TEST_CASE("lambda1 path is sparsity-monotone in the l1 norm") {
  Rng rng(17);
  const auto acc = make_acc(random_psd(rng, 8, 0.01), random_vec(rng, 8));
  double prev = std::numeric_limits<double>::infinity();
  for (const double lambda1 : {0.0, 0.01, 0.05, 0.1, 0.3, 0.6}) {
    const auto model = solve(acc, RegularizationSpec{lambda1, 0.05});
    double l1 = 0.0;
    for (double v : model.w) l1 += std::abs(v);
    CHECK(l1 <= prev + 1e-12);
    prev = l1;
  }
}

TEST_CASE("strict convexity: two starts agree") {
  Rng rng(27);
  const auto acc = make_acc(random_psd(rng, 7), random_vec(rng, 7));
  const RegularizationSpec reg{0.01, 0.2};
  const auto from_zero = solve(acc, reg);
  SolverOptions opts;
  opts.init_w.assign(7, 0.0);
  for (auto& v : opts.init_w) v = 2.0 * rng.uniform01() - 1.0;
  const auto from_random = solve(acc, reg, opts);
  double gap = 0.0;
  for (std::size_t i = 0; i < 7; ++i)
    gap += (from_zero.w[i] - from_random.w[i]) * (from_zero.w[i] - from_random.w[i]);
  CHECK(std::sqrt(gap) <= 1e-6);
}

TEST_CASE("singular sigma without regularization refuses, pseudo flag solves") {
  // rank-1 sigma, mu inside its range
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 1.0, 1.0, 1.0;
  const Eigen::Vector2d mu(2.0, 2.0);
  const auto acc = make_acc(sigma, mu);
  CHECK_THROWS_AS(solve(acc, RegularizationSpec{0.0, 0.0}), Error);
  CHECK_THROWS_AS(solve(acc, RegularizationSpec{0.1, 0.0}), Error);

  SolverOptions opts;
  opts.allow_pseudo = true;
  const auto model = solve(acc, RegularizationSpec{0.0, 0.0}, opts);
  CHECK(model.method == "pseudo_inverse");
  // minimum-norm solution of [[1,1],[1,1]] w = (2,2): w = (1,1)
  CHECK(model.w[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(model.w[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("indefinite sigma is rejected as corruption") {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  sigma(1, 1) = -1.0;
  const auto acc = make_acc(sigma, Eigen::Vector2d(1.0, 1.0));
  CHECK_THROWS_AS(solve(acc, RegularizationSpec{0.0, 0.5}), Error);
  CHECK_THROWS_AS(solve_ridge_direct(acc, 0.5), Error);
}

TEST_CASE("non-convergence error carries the last iterate") {
  Rng rng(41);
  const auto acc = make_acc(random_psd(rng, 10, 0.001), random_vec(rng, 10));
  SolverOptions opts;
  opts.max_sweeps = 1;
  opts.kkt_tol = 1e-14;
  opts.coord_tol = 1e-14;
  try {
    solve(acc, RegularizationSpec{0.0, 1e-9}, opts);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.last_iterate().size() == 10);
    CHECK(e.kkt_residual() > 0.0);
    CHECK(e.sweeps() == 1);
  }
}

TEST_CASE("kkt residual is small on every converged solve") {
  Rng rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 2 + rng.uniform_index(20);
    const auto acc = make_acc(random_psd(rng, d, 0.01), random_vec(rng, d));
    const RegularizationSpec reg{rep % 2 == 0 ? 0.01 : 0.0, 0.05};
    const auto model = solve(acc, reg);
    CHECK(kkt_residual(model.w, acc, reg) <= 1e-8);
  }
}

TEST_CASE("solve refuses an empty accumulator") {
  MomentAccumulator acc(3);
  CHECK_THROWS_AS(solve(acc, RegularizationSpec{0.0, 1.0}), Error);
}
