#include "core/baselines.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/moments.hpp"
#include "core/rng.hpp"

namespace mba {

namespace {

double step_size(const SgdConfig& config, std::uint64_t t) {
  return config.step_schedule == StepSchedule::InvSqrt
             ? config.c / std::sqrt(static_cast<double>(t))
             : config.c;
}

void check_config(const SgdConfig& config) {
  if (config.c <= 0.0) fail(ErrorKind::InvalidArgument, "step scale c must be positive");
  if (config.batch < 1) fail(ErrorKind::InvalidArgument, "batch size must be >= 1");
  if (config.lambda2 < 0.0) fail(ErrorKind::InvalidArgument, "lambda2 must be nonnegative");
}

}  // namespace

double logistic_loss(const std::vector<double>& w, const SparseExample& x, double y,
                     double lambda2) {
  const double margin = y * x.dot(w);
  // log(1 + exp(-m)) without overflow
  const double loss = margin > 0.0 ? std::log1p(std::exp(-margin))
                                   : -margin + std::log1p(std::exp(margin));
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return loss + 0.5 * lambda2 * sq;
}

void logistic_gradient(const std::vector<double>& w, const SparseExample& x, double y,
                       double lambda2, std::vector<double>& grad) {
  grad.assign(w.size(), 0.0);
  const double margin = y * x.dot(w);
  // sigmoid(-m), evaluated stably on both tails
  const double sig = margin > 0.0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                  : 1.0 / (1.0 + std::exp(margin));
  for (std::size_t k = 0; k < x.nnz(); ++k) grad[x.indices[k]] = -y * sig * x.values[k];
  if (lambda2 != 0.0)
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += lambda2 * w[i];
}

double pairwise_loss_value(PairwiseLoss loss, double score_diff) {
  const double slack = 1.0 - score_diff;
  return loss == PairwiseLoss::Psl ? slack * slack : std::max(0.0, slack);
}

double pairwise_subgradient_factor(PairwiseLoss loss, double score_diff) {
  if (loss == PairwiseLoss::Psl) return -2.0 * (1.0 - score_diff);
  return score_diff < 1.0 ? -1.0 : 0.0;
}

RankerModel train_olr(const LabeledDataset& ds, const SgdConfig& config,
                      std::vector<double>* loss_trace) {
  check_config(config);
  if (config.epochs < 1) fail(ErrorKind::InvalidArgument, "epochs must be >= 1");
  const std::size_t n = ds.size();
  if (n == 0) fail(ErrorKind::InvalidArgument, "empty dataset");

  std::vector<double> w(ds.d, 0.0);
  std::uint64_t t = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng = Rng::substream(config.seed, epoch);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

    for (std::size_t pos : order) {
      const bool is_pos = pos < ds.num_pos();
      const SparseExample& x = is_pos ? ds.positives[pos] : ds.negatives[pos - ds.num_pos()];
      const double y = is_pos ? 1.0 : -1.0;
      ++t;
      const double eta = step_size(config, t);

      const double margin = y * x.dot(w);
      if (loss_trace) {
        const double loss = margin > 0.0 ? std::log1p(std::exp(-margin))
                                         : -margin + std::log1p(std::exp(margin));
        loss_trace->push_back(loss);
      }
      const double sig = margin > 0.0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                      : 1.0 / (1.0 + std::exp(margin));
      if (config.lambda2 != 0.0) {
        const double shrink = 1.0 - eta * config.lambda2;
        for (auto& v : w) v *= shrink;
      }
      for (std::size_t k = 0; k < x.nnz(); ++k)
        w[x.indices[k]] += eta * y * sig * x.values[k];
    }
  }

  RankerModel model;
  model.w = std::move(w);
  model.reg = RegularizationSpec{0.0, config.lambda2};
  model.pairs_seen = 0;
  model.seed = config.seed;
  model.method = "olr";
  model.step_schedule = config.step_schedule == StepSchedule::InvSqrt ? "inv_sqrt" : "constant";
  model.step_c = config.c;
  model.rounds = static_cast<std::uint64_t>(config.epochs) * n;
  return model;
}

RankerModel train_mb_pairwise(const LabeledDataset& ds, const SgdConfig& config,
                              PairwiseLoss loss, std::vector<double>* loss_trace) {
  check_config(config);
  if (ds.positives.empty() || ds.negatives.empty())
    fail(ErrorKind::InvalidArgument, "pairwise training requires both classes nonempty");

  const std::size_t rounds =
      config.rounds > 0 ? config.rounds : (ds.size() + config.batch - 1) / config.batch;
  PairSampler sampler{config.seed, config.batch, rounds};

  std::vector<double> w(ds.d, 0.0);
  std::vector<double> g(ds.d, 0.0);

  for (std::size_t t = 0; t < rounds; ++t) {
    const auto pairs = sampler.sample_round(t, ds);
    const double eta = step_size(config, t + 1);

    std::fill(g.begin(), g.end(), 0.0);
    double round_loss = 0.0;
    for (const auto& [i, j] : pairs) {
      // w^T z for z = x+ - x-, from the two sparse dots
      const double diff = ds.positives[i].dot(w) - ds.negatives[j].dot(w);
      round_loss += pairwise_loss_value(loss, diff);
      const double factor = pairwise_subgradient_factor(loss, diff);
      if (factor != 0.0) {
        for (std::size_t k = 0; k < ds.positives[i].nnz(); ++k)
          g[ds.positives[i].indices[k]] += factor * ds.positives[i].values[k];
        for (std::size_t k = 0; k < ds.negatives[j].nnz(); ++k)
          g[ds.negatives[j].indices[k]] -= factor * ds.negatives[j].values[k];
      }
    }
    if (loss_trace) loss_trace->push_back(round_loss / static_cast<double>(pairs.size()));

    const double scale = eta / static_cast<double>(pairs.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] -= scale * g[i] + eta * config.lambda2 * w[i];
  }

  RankerModel model;
  model.w = std::move(w);
  model.reg = RegularizationSpec{0.0, config.lambda2};
  model.pairs_seen = static_cast<std::uint64_t>(rounds) * config.batch;
  model.seed = config.seed;
  model.method = loss == PairwiseLoss::Psl ? "mb_psl" : "mb_phl";
  model.step_schedule = config.step_schedule == StepSchedule::InvSqrt ? "inv_sqrt" : "constant";
  model.step_c = config.c;
  model.rounds = rounds;
  return model;
}

}  // namespace mba
