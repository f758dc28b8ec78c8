#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/evaluation.hpp"

namespace mba {

// One Gaussian component: weight, mean, and either an isotropic variance or a
// full covariance (kept with its Cholesky factor for sampling and log-density).
struct MixtureComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  bool isotropic = true;
  double variance = 1.0;        // isotropic case
  Eigen::MatrixXd covariance;   // full case
  Eigen::MatrixXd chol;         // lower factor of covariance (full case)
  double log_det = 0.0;         // log |covariance| (full case)
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
  std::size_t d = 0;

  void validate() const;  // weights sum to 1 within 1e-12, covariances PD
  double log_pdf(const Eigen::VectorXd& x) const;
  Eigen::VectorXd draw(class Rng& rng) const;
};

// Binary hypothesis pair; h0 generates the negative (label 0) class.
struct HypothesisPair {
  MixtureSpec h0;
  MixtureSpec h1;
  double imbalance = 0.9;  // P(label 0)
};

// The three simulation presets: symmetric mixtures with +-0.1 replicated
// means, identity covariances, 90% negatives.
HypothesisPair preset_hypotheses(int k, std::size_t d);

// n draws with binomial labeling at the pair's imbalance; deterministic given
// seed. Dense vectors are stored coordinate-sparse.
LabeledDataset sample_hypotheses(const HypothesisPair& pair, std::size_t n, std::uint64_t seed);

// log p1(x) - log p0(x) via log-sum-exp over components; any strictly
// increasing transform of the likelihood ratio is AUC-equivalent.
double np_score(const HypothesisPair& pair, const Eigen::VectorXd& x);

std::pair<std::vector<double>, std::vector<double>> np_score_dataset(const HypothesisPair& pair,
                                                                     const LabeledDataset& ds);

// Monte-Carlo AUC of the NP detector on a fresh test draw of size n_test.
AucReport np_auc(const HypothesisPair& pair, std::size_t n_test, std::uint64_t seed);

// Custom mixtures from JSON:
// {"imbalance": 0.9, "h0": {"d": 2, "components": [{"weight": 1, "mean": [..],
//  "variance": 1 | "covariance": [[..],..]}]}, "h1": {...}}
HypothesisPair hypotheses_from_json(const std::string& text);

}  // namespace mba
