#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/moments.hpp"
#include "core/simulation.hpp"
#include "core/solver.hpp"
#include "test_util.hpp"

using namespace mba;

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Eigen::VectorXd dense_point(const SparseExample& x, std::size_t d) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < x.nnz(); ++k) v[x.indices[k]] = x.values[k];
  return v;
}

}  // namespace

TEST_CASE("presets are the three symmetric mixtures") {
  const auto one = preset_hypotheses(1, 4);
  REQUIRE(one.h0.components.size() == 1);
  CHECK(one.h0.components[0].mean[2] == -0.1);
  CHECK(one.h1.components[0].mean[2] == 0.1);
  CHECK(one.h0.components[0].variance == 1.0);
  CHECK(one.imbalance == 0.9);

  const auto two = preset_hypotheses(2, 4);
  REQUIRE(two.h0.components.size() == 2);
  CHECK(two.h0.components[0].weight == 0.9);
  CHECK(two.h0.components[1].weight == 0.1);
  CHECK(two.h1.components[0].weight == 0.1);
  CHECK(two.h1.components[1].weight == 0.9);
  CHECK(two.h0.components[0].mean[0] == -0.1);
  CHECK(two.h0.components[1].mean[0] == 0.1);
  CHECK(two.h1.components[0].mean[0] == -0.1);  // shared means, swapped weights

  const auto three = preset_hypotheses(3, 4);
  REQUIRE(three.h0.components.size() == 3);
  CHECK(three.h0.components[0].weight == 0.8);
  CHECK(three.h0.components[1].mean[0] == 0.0);
  CHECK(three.h1.components[2].weight == 0.8);

  for (int k = 1; k <= 3; ++k) {
    const auto pair = preset_hypotheses(k, 7);
    double w0 = 0.0, w1 = 0.0;
    for (const auto& c : pair.h0.components) w0 += c.weight;
    for (const auto& c : pair.h1.components) w1 += c.weight;
    CHECK(w0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w1 == doctest::Approx(1.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(preset_hypotheses(0, 4), Error);
  CHECK_THROWS_AS(preset_hypotheses(4, 4), Error);
}

TEST_CASE("sampling respects the imbalance and the mixture means") {
  const auto pair = preset_hypotheses(1, 10);
  const std::size_t n = 100000;
  const auto ds = sample_hypotheses(pair, n, 321);

  const double neg_fraction = static_cast<double>(ds.num_neg()) / static_cast<double>(n);
  CHECK(neg_fraction >= 0.897);
  CHECK(neg_fraction <= 0.903);

  // per-class, per-coordinate CLT band: mean within 3 sigma / sqrt(n_class)
  auto class_mean = [&](const std::vector<SparseExample>& xs, std::size_t coord) {
    double mean = 0.0;
    for (const auto& x : xs) mean += dense_point(x, 10)[static_cast<Eigen::Index>(coord)];
    return mean / static_cast<double>(xs.size());
  };
  for (std::size_t coord = 0; coord < 10; ++coord) {
    const double band_neg = 3.0 / std::sqrt(static_cast<double>(ds.num_neg()));
    const double band_pos = 3.0 / std::sqrt(static_cast<double>(ds.num_pos()));
    CHECK(std::abs(class_mean(ds.negatives, coord) - (-0.1)) <= band_neg);
    CHECK(std::abs(class_mean(ds.positives, coord) - 0.1) <= band_pos);
  }

  const auto again = sample_hypotheses(pair, 500, 321);
  const auto once_more = sample_hypotheses(pair, 500, 321);
  CHECK(testutil::datasets_equal(again, once_more));
}

TEST_CASE("class covariances match the generator moments") {
  auto sample_cov = [](const std::vector<SparseExample>& xs, std::size_t d) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& x : xs) mean += dense_point(x, d);
    mean /= static_cast<double>(xs.size());
    for (const auto& x : xs) {
      const Eigen::VectorXd c = dense_point(x, d) - mean;
      sum += c * c.transpose();
    }
    return Eigen::MatrixXd(sum / static_cast<double>(xs.size() - 1));
  };
  auto spectral_dist = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a - b);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  };
  const std::size_t d = 20;

  // balance the draw so both classes get ~1e5 samples
  auto balanced = [&](int k) {
    auto pair = preset_hypotheses(k, d);
    pair.imbalance = 0.5;
    return sample_hypotheses(pair, 200000, 9 + k);
  };

  // k = 1: each class is a single Gaussian with identity covariance
  const auto ds1 = balanced(1);
  CHECK(spectral_dist(sample_cov(ds1.negatives, d), Eigen::MatrixXd::Identity(d, d)) <= 0.05);
  CHECK(spectral_dist(sample_cov(ds1.positives, d), Eigen::MatrixXd::Identity(d, d)) <= 0.05);

  // k = 2: class covariance is I + (E[m m'] - mbar mbar') for the mean mixture
  const auto ds2 = balanced(2);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
  const double between = 0.9 * 0.01 + 0.1 * 0.01 - 0.0064;  // weights .9/.1, means +-0.1
  const Eigen::MatrixXd expected =
      Eigen::MatrixXd::Identity(d, d) + between * ones * ones.transpose();
  CHECK(spectral_dist(sample_cov(ds2.negatives, d), expected) <= 0.05);
}

TEST_CASE("np_score of the 1-component preset is affine in the linear score") {
  const std::size_t d = 6;
  const auto pair = preset_hypotheses(1, d);
  Rng rng(55);
  Eigen::VectorXd direction = Eigen::VectorXd::Constant(d, 0.2);  // mu1 - mu0
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd x(d), y(d);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] = 4.0 * rng.uniform01() - 2.0;
      y[i] = 4.0 * rng.uniform01() - 2.0;
    }
    const double score_gap = np_score(pair, x) - np_score(pair, y);
    const double linear_gap = direction.dot(x - y);
    CHECK(score_gap == doctest::Approx(linear_gap).epsilon(1e-9));
  }
}

TEST_CASE("np_score vanishes at the origin for every preset") {
  for (int k = 1; k <= 3; ++k) {
    const auto pair = preset_hypotheses(k, 9);
    CHECK(std::abs(np_score(pair, Eigen::VectorXd::Zero(9))) <= 1e-12);
  }
}

TEST_CASE("log-sum-exp path matches the naive density ratio") {
  const auto pair = preset_hypotheses(3, 3);
  auto naive_density = [](const MixtureSpec& spec, const Eigen::VectorXd& x) {
    double p = 0.0;
    for (const auto& c : spec.components) {
      const double sq = (x - c.mean).squaredNorm();
      p += c.weight *
           std::pow(2.0 * M_PI * c.variance, -0.5 * static_cast<double>(x.size())) *
           std::exp(-0.5 * sq / c.variance);
    }
    return p;
  };
  Rng rng(66);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x(3);
    for (Eigen::Index i = 0; i < 3; ++i) x[i] = 6.0 * rng.uniform01() - 3.0;
    const double naive =
        std::log(naive_density(pair.h1, x)) - std::log(naive_density(pair.h0, x));
    CHECK(np_score(pair, x) == doctest::Approx(naive).epsilon(1e-9));
  }
}

TEST_CASE("custom mixture JSON round trip against the preset") {
  const std::string config = R"({
    "imbalance": 0.9,
    "h0": {"d": 3, "components": [{"weight": 1.0, "mean": [-0.1, -0.1, -0.1], "variance": 1.0}]},
    "h1": {"d": 3, "components": [{"weight": 1.0, "mean": [0.1, 0.1, 0.1], "variance": 1.0}]}
  })";
  const auto custom = hypotheses_from_json(config);
  const auto preset = preset_hypotheses(1, 3);
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(3);
    for (Eigen::Index i = 0; i < 3; ++i) x[i] = 4.0 * rng.uniform01() - 2.0;
    CHECK(np_score(custom, x) == doctest::Approx(np_score(preset, x)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(hypotheses_from_json("not json"), Error);
  CHECK_THROWS_AS(hypotheses_from_json(R"({"h0": {"d": 1, "components": []}})"), Error);

  // full covariance path: correlated 2-d Gaussian vs hand-coded density
  const std::string full = R"({
    "imbalance": 0.5,
    "h0": {"d": 2, "components": [{"weight": 1.0, "mean": [0, 0],
           "covariance": [[2.0, 0.5], [0.5, 1.0]]}]},
    "h1": {"d": 2, "components": [{"weight": 1.0, "mean": [1, 0], "variance": 1.0}]}
  })";
  const auto fancy = hypotheses_from_json(full);
  Eigen::Matrix2d cov;
  cov << 2.0, 0.5, 0.5, 1.0;
  const Eigen::Vector2d x(0.3, -0.7);
  const double log_p0 = -std::log(2.0 * M_PI) - 0.5 * std::log(cov.determinant()) -
                        0.5 * x.dot(cov.inverse() * x);
  const double log_p1 = -std::log(2.0 * M_PI) - 0.5 * (x - Eigen::Vector2d(1, 0)).squaredNorm();
  CHECK(np_score(fancy, x) == doctest::Approx(log_p1 - log_p0).epsilon(1e-9));
}

TEST_CASE("generated datasets export to LIBSVM and back") {
  const auto pair = preset_hypotheses(2, 5);
  const auto ds = sample_hypotheses(pair, 300, 88);
  const auto text = serialize_libsvm(ds);
  ParseOptions opts;
  opts.d_override = ds.d;
  CHECK(testutil::datasets_equal(ds, parse_libsvm(text, opts)));
}

TEST_SUITE("paper_values") {
  TEST_CASE("np oracle reproduces Table II for k = 1 and the closed form") {
    const auto pair = preset_hypotheses(1, 100);
    const auto report = np_auc(pair, 100000, 20240801);
    CHECK(std::abs(report.auc - 0.9213) <= 0.003);
    const double analytic = normal_cdf(0.2 * std::sqrt(100.0) / std::sqrt(2.0));
    CHECK(analytic == doctest::Approx(0.921350396).epsilon(1e-8));
    CHECK(std::abs(report.auc - analytic) <= 0.004);
  }

  TEST_CASE("np oracle reproduces Table II for k = 2 and k = 3") {
    CHECK(std::abs(np_auc(preset_hypotheses(2, 100), 100000, 7070).auc - 0.8371) <= 0.005);
    CHECK(std::abs(np_auc(preset_hypotheses(3, 100), 100000, 7171).auc - 0.8022) <= 0.005);
  }

  TEST_CASE("np detector dominates a trained linear ranker") {
    for (int k = 1; k <= 3; ++k) {
      const auto pair = preset_hypotheses(k, 30);
      const auto train = sample_hypotheses(pair, 8000, 100 + k);
      const auto test = sample_hypotheses(pair, 60000, 200 + k);

      MomentAccumulator acc(train.d);
      const PairSampler sampler{999, 256, 64};
      for (std::size_t t = 0; t < sampler.rounds; ++t)
        acc.absorb_batch(sampler.sample_round(t, train), train);
      const auto model = solve(acc, RegularizationSpec{0.0, 0.01});

      auto [mp, mn] = score(model, test);
      auto [np_pos, np_neg] = np_score_dataset(pair, test);
      CHECK(auc(np_pos, np_neg).auc >= auc(mp, mn).auc - 0.005);
    }
  }
}
