#include <doctest.h>

#include <cmath>

#include "core/bounds.hpp"
#include "core/error.hpp"
#include "core/simulation.hpp"
#include "test_util.hpp"

using namespace mba;

TEST_CASE("required_samples: epsilon scaling and log-d growth") {
  BoundInputs b;
  b.d = 100;
  b.r_x = 1.0;
  b.r_w = 4.0;
  b.sigma_norm = 10.0;  // sigma-dominated regime
  b.epsilon = 0.01;
  b.p = 0.05;

  BoundInputs doubled = b;
  doubled.epsilon = 0.02;
  const double s_small_eps = required_samples_matrix_branch(b);
  const double s_big_eps = required_samples_matrix_branch(doubled);
  CHECK(s_small_eps / s_big_eps > 2.0);
  CHECK(s_small_eps / s_big_eps < 4.0);

  BoundInputs wide = b;
  wide.d = 1000;
  const double diff =
      required_samples_matrix_branch(wide) - required_samples_matrix_branch(b);
  const double expected = std::log(10.0) *
                          (48.0 * b.r_w * b.r_w * b.sigma_norm + 16.0 * b.epsilon * b.r_w) *
                          b.r_x / (3.0 * b.epsilon * b.epsilon);
  CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("required_samples matches an independent arithmetic oracle") {
  BoundInputs b;
  b.d = 100;
  b.r_x = 1.0;
  b.r_w = 4.0;
  b.sigma_norm = 0.5;
  b.epsilon = 0.1;
  b.p = 0.05;

  // hand recomputation with long doubles and different grouping
  const long double eps = 0.1L, rw = 4.0L, rx = 1.0L, sigma = 0.5L, p = 0.05L;
  const long double branch1 =
      logl(4.0L * 100.0L / p) / (3.0L * eps * eps) *
      ((48.0L * rw * rw * sigma + 16.0L * eps * rw) * rx);
  const long double branch2 = logl(4.0L / p) / (3.0L * eps * eps) *
                              (48.0L * rw * sigma + 16.0L * eps * sqrtl(rx * rw));
  const auto oracle =
      static_cast<std::uint64_t>(ceill(branch1 > branch2 ? branch1 : branch2));

  CHECK(required_samples(b) == oracle);

  BoundInputs overflow = b;
  overflow.epsilon = 1e-300;
  CHECK_THROWS_AS(required_samples(overflow), Error);
  BoundInputs bad = b;
  bad.p = 1.5;
  CHECK_THROWS_AS(required_samples(bad), Error);
}

TEST_CASE("bernstein tails: monotone, clipped, d = 1 reduction") {
  BoundInputs b;
  b.d = 50;
  b.r_x = 1.0;
  b.r_w = 4.0;
  b.sigma_norm = 0.5;
  b.epsilon = 0.1;
  b.p = 0.05;

  double prev = 2.0;
  for (const std::uint64_t s : {100, 1000, 10000, 100000}) {
    const double tail = bernstein_tail(0.1, s, b, BernsteinCase::Matrix);
    CHECK(tail <= prev);
    CHECK(tail >= 0.0);
    CHECK(tail <= 1.0);
    prev = tail;
  }
  prev = 2.0;
  for (const double gamma : {0.05, 0.1, 0.2, 0.4}) {
    const double tail = bernstein_tail(gamma, 5000, b, BernsteinCase::Scalar);
    CHECK(tail <= prev);
    prev = tail;
  }

  // d = 1 matrix case: 2 exp{-S g^2 / (4 R_x sigma + (8/3) g R_x)}
  BoundInputs scalar_like = b;
  scalar_like.d = 1;
  const double gamma = 0.13, s = 4000.0;
  const double direct =
      2.0 * std::exp(-s * gamma * gamma /
                     (4.0 * b.r_x * b.sigma_norm + (8.0 / 3.0) * gamma * b.r_x));
  CHECK(bernstein_tail(gamma, 4000, scalar_like, BernsteinCase::Matrix) ==
        doctest::Approx(direct).epsilon(1e-15));

  // fixed-point value against an independent recomputation
  const double matrix_tail = bernstein_tail(0.1, 10000, b, BernsteinCase::Matrix);
  const double recompute =
      std::min(1.0, 2.0 * 50.0 *
                        std::exp(-10000.0 * 0.01 /
                                 (4.0 * 1.0 * 0.5 + (8.0 / 3.0) * 0.1 * 1.0)));
  CHECK(matrix_tail == doctest::Approx(recompute).epsilon(1e-12));
}

TEST_CASE("measure_concentration recovers the exact solution at S = N+ N-") {
  const auto pair = preset_hypotheses(1, 8);
  const auto ds = sample_hypotheses(pair, 80, 5);
  const auto all_pairs =
      static_cast<std::uint64_t>(ds.num_pos()) * static_cast<std::uint64_t>(ds.num_neg());

  const auto records =
      measure_concentration(ds, RegularizationSpec{0.0, 0.01}, {all_pairs}, 2, 42, 1);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(r.w_gap <= 1e-8);
    CHECK(r.delta_mu_norm <= 1e-12);
    CHECK(r.delta_sigma_norm <= 1e-10);
  }
}

TEST_CASE("concentration medians shrink with S and obey the sandwich") {
  const auto pair = preset_hypotheses(1, 12);
  const auto ds = sample_hypotheses(pair, 1200, 31);
  const RegularizationSpec reg{0.0, 0.01};

  const auto records = measure_concentration(ds, reg, {100, 10000}, 30, 7, 0);
  REQUIRE(records.size() == 60);

  for (const auto& r : records) {
    CHECK(r.objective_gap >= -1e-12);
    // 0 <= L_N(w_S) - L_N(w_N) <= Delta(w_N) - Delta(w_S)
    CHECK(r.objective_gap <= r.delta_bound + 1e-10);
    // |w_S|^2 <= (|mu_S| / lambda2)^2, the regularization-implied radius
    CHECK(r.w_s_sq_norm <= r.r_w_implied * (1.0 + 1e-12));
  }

  const auto summary = summarize_concentration(records);
  REQUIRE(summary.size() == 2);
  CHECK(summary[0].s == 100);
  CHECK(summary[1].s == 10000);
  CHECK(summary[1].median_w_gap < summary[0].median_w_gap);
  CHECK(summary[1].median_delta_sigma < summary[0].median_delta_sigma);
  CHECK(summary[0].median_w_gap / summary[1].median_w_gap >= 3.0);

  CHECK_THROWS_AS(measure_concentration(ds, RegularizationSpec{0.0, 0.0}, {10}, 2, 1, 1),
                  Error);
}

TEST_CASE("parallel and sequential concentration runs agree") {
  const auto pair = preset_hypotheses(2, 6);
  const auto ds = sample_hypotheses(pair, 400, 77);
  const RegularizationSpec reg{0.0, 0.05};
  const auto seq = measure_concentration(ds, reg, {50, 200}, 6, 123, 1);
  const auto par = measure_concentration(ds, reg, {50, 200}, 6, 123, 4);
  REQUIRE(seq.size() == par.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    CHECK(seq[k].w_gap == par[k].w_gap);
    CHECK(seq[k].delta_sigma_norm == par[k].delta_sigma_norm);
  }
}

TEST_CASE("empirical tails stay under the Bernstein bound") {
  const auto pair = preset_hypotheses(1, 10);
  const auto ds = normalize_l2(sample_hypotheses(pair, 1000, 99));
  const RegularizationSpec reg{0.0, 0.01};
  const std::vector<std::uint64_t> grid{200, 2000};
  const auto records = measure_concentration(ds, reg, grid, 40, 11, 0);

  const auto exact = exact_full_pair_moments(ds);
  BoundInputs b;
  b.d = ds.d;
  b.r_x = ds.max_squared_norm();
  b.r_w = 1.0;  // unused in the matrix case
  b.sigma_norm = sigma_spectral_norm(exact);
  b.epsilon = 0.1;
  b.p = 0.05;

  std::size_t held = 0, total = 0;
  for (const std::uint64_t s : grid) {
    std::vector<double> norms;
    for (const auto& r : records)
      if (r.s == s) norms.push_back(r.delta_sigma_norm);
    std::sort(norms.begin(), norms.end());
    const double p90 = norms[static_cast<std::size_t>(0.9 * (norms.size() - 1))];
    // the bound is an upper bound: at the empirical 90th percentile the true
    // tail is 0.1, so the bound must not dip far below it
    ++total;
    if (bernstein_tail(p90, s, b, BernsteinCase::Matrix) >= 0.1) ++held;

    for (const double gamma : {0.5 * p90, p90, 2.0 * p90}) {
      double exceed = 0.0;
      for (double nrm : norms)
        if (nrm > gamma) exceed += 1.0;
      exceed /= static_cast<double>(norms.size());
      CHECK(exceed <= bernstein_tail(gamma, s, b, BernsteinCase::Matrix) + 0.05);
    }
  }
  CHECK(static_cast<double>(held) >= 0.8 * static_cast<double>(total));
}

TEST_CASE("sigma spectral norm via power iteration matches Eigen") {
  const auto pair = preset_hypotheses(2, 9);
  const auto ds = sample_hypotheses(pair, 500, 3);
  const auto acc = exact_full_pair_moments(ds);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(acc.sigma().to_dense());
  const double reference = eig.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(sigma_spectral_norm(acc) == doctest::Approx(reference).epsilon(1e-7));
}
