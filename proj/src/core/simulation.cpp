#include "core/simulation.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mba {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double component_log_pdf(const MixtureComponent& c, const Eigen::VectorXd& x) {
  const auto d = static_cast<double>(x.size());
  if (c.isotropic) {
    const double sq = (x - c.mean).squaredNorm();
    return -0.5 * d * (kLog2Pi + std::log(c.variance)) - 0.5 * sq / c.variance;
  }
  const Eigen::VectorXd centered = x - c.mean;
  const Eigen::VectorXd solved =
      c.chol.triangularView<Eigen::Lower>().solve(centered);
  return -0.5 * d * kLog2Pi - 0.5 * c.log_det - 0.5 * solved.squaredNorm();
}

double log_sum_exp(const std::vector<double>& terms) {
  double best = -std::numeric_limits<double>::infinity();
  for (double t : terms) best = std::max(best, t);
  if (!std::isfinite(best)) return best;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

}  // namespace

void MixtureSpec::validate() const {
  if (components.empty()) fail(ErrorKind::InvalidArgument, "mixture needs >= 1 component");
  if (d == 0) fail(ErrorKind::InvalidArgument, "mixture dimension must be >= 1");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0))
      fail(ErrorKind::InvalidArgument, "component weights must lie in (0,1]");
    if (c.mean.size() != static_cast<Eigen::Index>(d))
      fail(ErrorKind::Dimension, "component mean dimension mismatch");
    if (c.isotropic) {
      if (!(c.variance > 0.0))
        fail(ErrorKind::InvalidArgument, "isotropic variance must be positive");
    } else if (c.chol.rows() != static_cast<Eigen::Index>(d)) {
      fail(ErrorKind::Dimension, "component covariance dimension mismatch");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorKind::InvalidArgument,
         "component weights sum to " + std::to_string(total) + ", expected 1");
}

double MixtureSpec::log_pdf(const Eigen::VectorXd& x) const {
  std::vector<double> terms;
  terms.reserve(components.size());
  for (const auto& c : components) terms.push_back(std::log(c.weight) + component_log_pdf(c, x));
  return log_sum_exp(terms);
}

Eigen::VectorXd MixtureSpec::draw(Rng& rng) const {
  // Categorical component pick, then a Gaussian draw.
  double u = rng.uniform01();
  std::size_t pick = components.size() - 1;
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (u < components[k].weight) {
      pick = k;
      break;
    }
    u -= components[k].weight;
  }
  const auto& c = components[pick];
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  if (c.isotropic) return c.mean + std::sqrt(c.variance) * z;
  return c.mean + c.chol * z;
}

HypothesisPair preset_hypotheses(int k, std::size_t d) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "preset dimension must be >= 1");
  auto iso = [&](double weight, double mean_value) {
    MixtureComponent c;
    c.weight = weight;
    c.mean = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), mean_value);
    c.isotropic = true;
    c.variance = 1.0;
    return c;
  };
  HypothesisPair pair;
  pair.imbalance = 0.9;
  pair.h0.d = pair.h1.d = d;
  switch (k) {
    case 1:
      pair.h0.components = {iso(1.0, -0.1)};
      pair.h1.components = {iso(1.0, 0.1)};
      break;
    case 2:
      pair.h0.components = {iso(0.9, -0.1), iso(0.1, 0.1)};
      pair.h1.components = {iso(0.1, -0.1), iso(0.9, 0.1)};
      break;
    case 3:
      pair.h0.components = {iso(0.8, -0.1), iso(0.1, 0.0), iso(0.1, 0.1)};
      pair.h1.components = {iso(0.1, -0.1), iso(0.1, 0.0), iso(0.8, 0.1)};
      break;
    default:
      fail(ErrorKind::InvalidArgument, "preset k must be 1, 2, or 3");
  }
  pair.h0.validate();
  pair.h1.validate();
  return pair;
}

LabeledDataset sample_hypotheses(const HypothesisPair& pair, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "sample size must be >= 1");
  if (pair.h0.d != pair.h1.d) fail(ErrorKind::Dimension, "hypothesis dimensions differ");
  if (!(pair.imbalance > 0.0 && pair.imbalance < 1.0))
    fail(ErrorKind::InvalidArgument, "imbalance must lie in (0,1)");

  LabeledDataset ds;
  ds.d = pair.h0.d;
  ds.name = "simulated";
  Rng rng(seed);
  SparseExample x;
  x.indices.resize(ds.d);
  for (std::size_t i = 0; i < ds.d; ++i) x.indices[i] = static_cast<std::uint32_t>(i);
  x.values.resize(ds.d);

  for (std::size_t i = 0; i < n; ++i) {
    const bool negative = rng.uniform01() < pair.imbalance;
    const Eigen::VectorXd v = (negative ? pair.h0 : pair.h1).draw(rng);
    for (std::size_t j = 0; j < ds.d; ++j) x.values[j] = v[static_cast<Eigen::Index>(j)];
    (negative ? ds.negatives : ds.positives).push_back(x);
  }
  return ds;
}

double np_score(const HypothesisPair& pair, const Eigen::VectorXd& x) {
  return pair.h1.log_pdf(x) - pair.h0.log_pdf(x);
}

std::pair<std::vector<double>, std::vector<double>> np_score_dataset(const HypothesisPair& pair,
                                                                     const LabeledDataset& ds) {
  if (ds.d != pair.h0.d) fail(ErrorKind::Dimension, "dataset/hypothesis dimension mismatch");
  Eigen::VectorXd x(static_cast<Eigen::Index>(ds.d));
  auto score_class = [&](const std::vector<SparseExample>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& ex : xs) {
      x.setZero();
      for (std::size_t k = 0; k < ex.nnz(); ++k)
        x[static_cast<Eigen::Index>(ex.indices[k])] = ex.values[k];
      out.push_back(np_score(pair, x));
    }
    return out;
  };
  return {score_class(ds.positives), score_class(ds.negatives)};
}

AucReport np_auc(const HypothesisPair& pair, std::size_t n_test, std::uint64_t seed) {
  if (n_test < 2) fail(ErrorKind::InvalidArgument, "np_auc needs n_test >= 2");
  const LabeledDataset test = sample_hypotheses(pair, n_test, seed);
  auto [pos, neg] = np_score_dataset(pair, test);
  return auc(pos, neg);
}

namespace {

MixtureSpec mixture_from_json(const nlohmann::json& j) {
  MixtureSpec spec;
  spec.d = j.at("d").get<std::size_t>();
  for (const auto& cj : j.at("components")) {
    MixtureComponent c;
    c.weight = cj.at("weight").get<double>();
    const auto mean = cj.at("mean").get<std::vector<double>>();
    if (mean.size() != spec.d) fail(ErrorKind::Config, "mixture mean length != d");
    c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(spec.d));
    if (cj.contains("covariance")) {
      c.isotropic = false;
      const auto rows = cj.at("covariance").get<std::vector<std::vector<double>>>();
      if (rows.size() != spec.d) fail(ErrorKind::Config, "covariance must be d x d");
      c.covariance.resize(static_cast<Eigen::Index>(spec.d), static_cast<Eigen::Index>(spec.d));
      for (std::size_t r = 0; r < spec.d; ++r) {
        if (rows[r].size() != spec.d) fail(ErrorKind::Config, "covariance must be d x d");
        for (std::size_t cidx = 0; cidx < spec.d; ++cidx)
          c.covariance(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cidx)) =
              rows[r][cidx];
      }
      Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
      if (llt.info() != Eigen::Success)
        fail(ErrorKind::Config, "covariance is not positive definite");
      c.chol = llt.matrixL();
      c.log_det = 2.0 * c.chol.diagonal().array().log().sum();
    } else {
      c.isotropic = true;
      c.variance = cj.value("variance", 1.0);
    }
    spec.components.push_back(std::move(c));
  }
  spec.validate();
  return spec;
}

}  // namespace

HypothesisPair hypotheses_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Parse, "mixture config is not valid JSON");
  HypothesisPair pair;
  pair.imbalance = j.value("imbalance", 0.9);
  pair.h0 = mixture_from_json(j.at("h0"));
  pair.h1 = mixture_from_json(j.at("h1"));
  if (pair.h0.d != pair.h1.d) fail(ErrorKind::Config, "h0 and h1 dimensions differ");
  if (!(pair.imbalance > 0.0 && pair.imbalance < 1.0))
    fail(ErrorKind::Config, "imbalance must lie in (0,1)");
  return pair;
}

}  // namespace mba
