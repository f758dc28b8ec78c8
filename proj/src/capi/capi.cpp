#include "mba/mba.h"

#include <cstring>
#include <string>

#include "core/baselines.hpp"
#include "core/bounds.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/model_io.hpp"
#include "core/moments.hpp"
#include "core/simulation.hpp"
#include "core/solver.hpp"

struct mba_dataset {
  mba::LabeledDataset impl;
};
struct mba_accumulator {
  mba::MomentAccumulator impl;
};
struct mba_model {
  mba::RankerModel impl;
};
struct mba_mixture {
  mba::HypothesisPair impl;
};

namespace {

thread_local std::string g_last_error;

mba_status status_of(mba::ErrorKind kind) {
  switch (kind) {
    case mba::ErrorKind::InvalidArgument: return MBA_ERR_INVALID_ARGUMENT;
    case mba::ErrorKind::Parse: return MBA_ERR_PARSE;
    case mba::ErrorKind::Io: return MBA_ERR_IO;
    case mba::ErrorKind::Dimension: return MBA_ERR_DIMENSION;
    case mba::ErrorKind::Numeric: return MBA_ERR_NUMERIC;
    case mba::ErrorKind::Config: return MBA_ERR_CONFIG;
  }
  return MBA_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
mba_status guarded(Fn&& fn) {
  try {
    fn();
    return MBA_OK;
  } catch (const mba::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return MBA_ERR_NUMERIC;
  }
}

mba_status arg_error(const char* message) {
  g_last_error = message;
  return MBA_ERR_INVALID_ARGUMENT;
}

void copy_string(char* dst, size_t cap, const std::string& src) {
  const size_t n = src.size() < cap - 1 ? src.size() : cap - 1;
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* mba_version(void) { return "0.1.0"; }

const char* mba_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------- datasets -------------------------------- */

mba_status mba_dataset_load(const char* path, size_t d_override, size_t max_d,
                            mba_dataset** out) {
  if (path == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    mba::ParseOptions opts;
    opts.d_override = d_override;
    if (max_d != 0) opts.max_d = max_d;
    *out = new mba_dataset{mba::load_libsvm_file(path, opts)};
  });
}

mba_status mba_dataset_parse(const char* text, size_t len, size_t d_override, size_t max_d,
                             mba_dataset** out) {
  if (text == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    mba::ParseOptions opts;
    opts.d_override = d_override;
    if (max_d != 0) opts.max_d = max_d;
    *out = new mba_dataset{mba::parse_libsvm(std::string(text, len), opts)};
  });
}

mba_status mba_dataset_save(const mba_dataset* ds, const char* path) {
  if (ds == nullptr || path == nullptr) return arg_error("null argument");
  return guarded([&] { mba::save_libsvm_file(ds->impl, path); });
}

void mba_dataset_free(mba_dataset* ds) { delete ds; }

size_t mba_dataset_num_pos(const mba_dataset* ds) { return ds ? ds->impl.num_pos() : 0; }
size_t mba_dataset_num_neg(const mba_dataset* ds) { return ds ? ds->impl.num_neg() : 0; }
size_t mba_dataset_dim(const mba_dataset* ds) { return ds ? ds->impl.d : 0; }

mba_status mba_dataset_max_squared_norm(const mba_dataset* ds, double* out) {
  if (ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = ds->impl.max_squared_norm(); });
}

mba_status mba_dataset_example(const mba_dataset* ds, int positive, size_t row,
                               uint32_t* indices, double* values, size_t cap, size_t* nnz) {
  if (ds == nullptr || nnz == nullptr) return arg_error("null argument");
  return guarded([&] {
    const auto& list = positive ? ds->impl.positives : ds->impl.negatives;
    if (row >= list.size()) mba::fail(mba::ErrorKind::InvalidArgument, "example row out of range");
    const auto& x = list[row];
    *nnz = x.nnz();
    if (indices == nullptr && values == nullptr) return;
    if (cap < x.nnz())
      mba::fail(mba::ErrorKind::InvalidArgument, "example buffer too small");
    for (size_t k = 0; k < x.nnz(); ++k) {
      if (indices != nullptr) indices[k] = x.indices[k];
      if (values != nullptr) values[k] = x.values[k];
    }
  });
}

mba_status mba_dataset_split(const mba_dataset* ds, double test_fraction, int stratified,
                             uint64_t seed, mba_dataset** train, mba_dataset** test) {
  if (ds == nullptr || train == nullptr || test == nullptr) return arg_error("null argument");
  return guarded([&] {
    auto result = mba::stratified_split(
        ds->impl, mba::SplitSpec{test_fraction, stratified != 0, seed});
    *train = new mba_dataset{std::move(result.train)};
    *test = new mba_dataset{std::move(result.test)};
  });
}

mba_status mba_dataset_normalize_l2(const mba_dataset* ds, mba_dataset** out) {
  if (ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_dataset{mba::normalize_l2(ds->impl)}; });
}

mba_status mba_dataset_subsample(const mba_dataset* ds, double fraction, uint64_t seed,
                                 mba_dataset** out) {
  if (ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_dataset{mba::subsample(ds->impl, fraction, seed)}; });
}

/* ----------------------------- accumulators ------------------------------ */

mba_status mba_accumulator_create(size_t d, mba_accumulator** out) {
  if (out == nullptr) return arg_error("null argument");
  if (d == 0) return arg_error("dimension must be >= 1");
  return guarded([&] { *out = new mba_accumulator{mba::MomentAccumulator(d)}; });
}

void mba_accumulator_free(mba_accumulator* acc) { delete acc; }

mba_status mba_accumulate_pairs(mba_accumulator* acc, const mba_dataset* ds, size_t batch,
                                size_t rounds, uint64_t seed) {
  if (acc == nullptr || ds == nullptr) return arg_error("null argument");
  return guarded([&] {
    mba::PairSampler sampler{seed, batch, rounds};
    if (sampler.batch < 1 || sampler.rounds < 1)
      mba::fail(mba::ErrorKind::InvalidArgument, "batch and rounds must be >= 1");
    for (size_t t = 0; t < sampler.rounds; ++t)
      acc->impl.absorb_batch(sampler.sample_round(t, ds->impl), ds->impl);
  });
}

mba_status mba_accumulator_exact(const mba_dataset* ds, mba_accumulator** out) {
  if (ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_accumulator{mba::exact_full_pair_moments(ds->impl)}; });
}

mba_status mba_accumulator_all_pairs(const mba_dataset* ds, mba_accumulator** out) {
  if (ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_accumulator{mba::accumulate_all_pairs(ds->impl)}; });
}

mba_status mba_accumulator_merge(const mba_accumulator* a, const mba_accumulator* b,
                                 mba_accumulator** out) {
  if (a == nullptr || b == nullptr || out == nullptr) return arg_error("null argument");
  return guarded(
      [&] { *out = new mba_accumulator{mba::MomentAccumulator::merge(a->impl, b->impl)}; });
}

uint64_t mba_accumulator_count(const mba_accumulator* acc) {
  return acc ? acc->impl.count() : 0;
}

size_t mba_accumulator_dim(const mba_accumulator* acc) { return acc ? acc->impl.dim() : 0; }

mba_status mba_accumulator_mu(const mba_accumulator* acc, double* buf, size_t len) {
  if (acc == nullptr || buf == nullptr) return arg_error("null argument");
  if (len < acc->impl.dim()) return arg_error("mu buffer too small");
  return guarded([&] {
    const auto& mu = acc->impl.mu();
    std::memcpy(buf, mu.data(), mu.size() * sizeof(double));
  });
}

mba_status mba_accumulator_sigma(const mba_accumulator* acc, double* buf, size_t len) {
  if (acc == nullptr || buf == nullptr) return arg_error("null argument");
  const size_t d = acc ? acc->impl.dim() : 0;
  if (len < d * d) return arg_error("sigma buffer too small");
  return guarded([&] {
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) buf[i * d + j] = acc->impl.sigma().at(i, j);
  });
}

mba_status mba_accumulator_save(const mba_accumulator* acc, const char* path) {
  if (acc == nullptr || path == nullptr) return arg_error("null argument");
  return guarded([&] { mba::save_accumulator(acc->impl, path); });
}

mba_status mba_accumulator_load(const char* path, mba_accumulator** out) {
  if (path == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_accumulator{mba::load_accumulator(path)}; });
}

mba_status mba_sigma_spectral_norm(const mba_accumulator* acc, double* out) {
  if (acc == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = mba::sigma_spectral_norm(acc->impl); });
}

/* -------------------------------- solver --------------------------------- */

namespace {

mba::SolverOptions to_core_options(const mba_solve_options* options) {
  mba::SolverOptions opts;
  if (options->kkt_tol > 0.0) opts.kkt_tol = options->kkt_tol;
  if (options->coord_tol > 0.0) opts.coord_tol = options->coord_tol;
  if (options->max_sweeps != 0) opts.max_sweeps = options->max_sweeps;
  opts.allow_pseudo = options->allow_pseudo != 0;
  return opts;
}

}  // namespace

mba_status mba_solve(const mba_accumulator* acc, const mba_solve_options* options,
                     mba_model** out) {
  if (acc == nullptr || options == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    auto model = mba::solve(acc->impl,
                            mba::RegularizationSpec{options->lambda1, options->lambda2},
                            to_core_options(options));
    model.seed = options->seed;
    *out = new mba_model{std::move(model)};
  });
}

mba_status mba_solve_ridge(const mba_accumulator* acc, double lambda2, mba_model** out) {
  if (acc == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_model{mba::solve_ridge_direct(acc->impl, lambda2)}; });
}

mba_status mba_objective(const mba_accumulator* acc, const double* w, size_t d, double lambda1,
                         double lambda2, double* out) {
  if (acc == nullptr || w == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    *out = mba::objective(std::vector<double>(w, w + d), acc->impl,
                          mba::RegularizationSpec{lambda1, lambda2});
  });
}

mba_status mba_kkt_residual(const mba_accumulator* acc, const double* w, size_t d,
                            double lambda1, double lambda2, double* out) {
  if (acc == nullptr || w == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    *out = mba::kkt_residual(std::vector<double>(w, w + d), acc->impl,
                             mba::RegularizationSpec{lambda1, lambda2});
  });
}

/* -------------------------------- models --------------------------------- */

void mba_model_free(mba_model* model) { delete model; }

size_t mba_model_dim(const mba_model* model) { return model ? model->impl.dim() : 0; }

mba_status mba_model_weights(const mba_model* model, double* buf, size_t len) {
  if (model == nullptr || buf == nullptr) return arg_error("null argument");
  if (len < model->impl.dim()) return arg_error("weight buffer too small");
  return guarded([&] {
    std::memcpy(buf, model->impl.w.data(), model->impl.w.size() * sizeof(double));
  });
}

mba_status mba_model_get_info(const mba_model* model, mba_model_info* out) {
  if (model == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    const auto& m = model->impl;
    out->lambda1 = m.reg.lambda1;
    out->lambda2 = m.reg.lambda2;
    out->objective_value = m.objective_value;
    out->residual = m.residual;
    out->step_c = m.step_c;
    out->pairs_seen = m.pairs_seen;
    out->seed = m.seed;
    out->iters = m.iters;
    out->rounds = m.rounds;
    copy_string(out->method, sizeof(out->method), m.method);
    copy_string(out->step_schedule, sizeof(out->step_schedule), m.step_schedule);
  });
}

mba_status mba_model_save(const mba_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return arg_error("null argument");
  return guarded([&] { mba::save_model(model->impl, path); });
}

mba_status mba_model_load(const char* path, mba_model** out) {
  if (path == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_model{mba::load_model(path)}; });
}

/* ------------------------------- baselines ------------------------------- */

namespace {

mba::SgdConfig to_core_sgd(const mba_sgd_options* options) {
  mba::SgdConfig config;
  config.step_schedule = options->step_schedule == MBA_STEP_CONSTANT
                             ? mba::StepSchedule::Constant
                             : mba::StepSchedule::InvSqrt;
  if (options->c > 0.0) config.c = options->c;
  if (options->epochs != 0) config.epochs = options->epochs;
  config.rounds = options->rounds;
  if (options->batch != 0) config.batch = options->batch;
  config.lambda2 = options->lambda2;
  config.seed = options->seed;
  return config;
}

}  // namespace

mba_status mba_train_olr(const mba_dataset* ds, const mba_sgd_options* options,
                         mba_model** out) {
  if (ds == nullptr || options == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_model{mba::train_olr(ds->impl, to_core_sgd(options))}; });
}

mba_status mba_train_pairwise(const mba_dataset* ds, const mba_sgd_options* options, int loss,
                              mba_model** out) {
  if (ds == nullptr || options == nullptr || out == nullptr) return arg_error("null argument");
  if (loss != MBA_LOSS_PSL && loss != MBA_LOSS_PHL) return arg_error("unknown pairwise loss");
  return guarded([&] {
    *out = new mba_model{mba::train_mb_pairwise(
        ds->impl, to_core_sgd(options),
        loss == MBA_LOSS_PSL ? mba::PairwiseLoss::Psl : mba::PairwiseLoss::Phl)};
  });
}

/* ------------------------------ evaluation ------------------------------- */

namespace {

mba_auc_report to_c_report(const mba::AucReport& r) {
  return mba_auc_report{r.auc, r.n_pos, r.n_neg, r.tie_mass};
}

}  // namespace

mba_status mba_auc(const double* pos, size_t n_pos, const double* neg, size_t n_neg,
                   mba_auc_report* out) {
  if (pos == nullptr || neg == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    *out = to_c_report(
        mba::auc(std::vector<double>(pos, pos + n_pos), std::vector<double>(neg, neg + n_neg)));
  });
}

mba_status mba_model_score(const mba_model* model, const mba_dataset* ds, double* pos,
                           size_t pos_len, double* neg, size_t neg_len) {
  if (model == nullptr || ds == nullptr || pos == nullptr || neg == nullptr)
    return arg_error("null argument");
  if (pos_len < ds->impl.num_pos() || neg_len < ds->impl.num_neg())
    return arg_error("score buffer too small");
  return guarded([&] {
    auto [p, n] = mba::score(model->impl, ds->impl);
    std::memcpy(pos, p.data(), p.size() * sizeof(double));
    std::memcpy(neg, n.data(), n.size() * sizeof(double));
  });
}

mba_status mba_model_eval(const mba_model* model, const mba_dataset* ds, mba_auc_report* out) {
  if (model == nullptr || ds == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    auto [p, n] = mba::score(model->impl, ds->impl);
    *out = to_c_report(mba::auc(p, n));
  });
}

mba_status mba_roc_points(const double* pos, size_t n_pos, const double* neg, size_t n_neg,
                          double* xy, size_t cap_points, size_t* n_points) {
  if (pos == nullptr || neg == nullptr || n_points == nullptr) return arg_error("null argument");
  return guarded([&] {
    const auto curve = mba::roc_curve(std::vector<double>(pos, pos + n_pos),
                                      std::vector<double>(neg, neg + n_neg));
    *n_points = curve.points.size();
    if (xy == nullptr) return;
    if (cap_points < curve.points.size())
      mba::fail(mba::ErrorKind::InvalidArgument, "ROC buffer too small");
    for (size_t k = 0; k < curve.points.size(); ++k) {
      xy[2 * k] = curve.points[k].first;
      xy[2 * k + 1] = curve.points[k].second;
    }
  });
}

mba_status mba_paired_ttest(const double* a, const double* b, size_t n, mba_ttest_result* out) {
  if (a == nullptr || b == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    const auto r =
        mba::paired_ttest(std::vector<double>(a, a + n), std::vector<double>(b, b + n));
    out->t_stat = r.t_stat;
    out->dof = r.dof;
    out->significant_95 = r.significant_95 ? 1 : 0;
    out->direction = r.direction == mba::TTestResult::Direction::Better   ? 1
                     : r.direction == mba::TTestResult::Direction::Worse ? -1
                                                                          : 0;
    out->infinite_t = r.infinite_t ? 1 : 0;
  });
}

/* ------------------------------- simulation ------------------------------ */

mba_status mba_mixture_preset(int k, size_t d, mba_mixture** out) {
  if (out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_mixture{mba::preset_hypotheses(k, d)}; });
}

mba_status mba_mixture_from_json(const char* text, size_t len, mba_mixture** out) {
  if (text == nullptr || out == nullptr) return arg_error("null argument");
  return guarded(
      [&] { *out = new mba_mixture{mba::hypotheses_from_json(std::string(text, len))}; });
}

void mba_mixture_free(mba_mixture* mix) { delete mix; }

size_t mba_mixture_dim(const mba_mixture* mix) { return mix ? mix->impl.h0.d : 0; }

mba_status mba_mixture_sample(const mba_mixture* mix, size_t n, uint64_t seed,
                              mba_dataset** out) {
  if (mix == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new mba_dataset{mba::sample_hypotheses(mix->impl, n, seed)}; });
}

mba_status mba_mixture_np_score(const mba_mixture* mix, const double* x, size_t d, double* out) {
  if (mix == nullptr || x == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    if (d != mix->impl.h0.d) mba::fail(mba::ErrorKind::Dimension, "point dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> point(x, static_cast<Eigen::Index>(d));
    *out = mba::np_score(mix->impl, point);
  });
}

mba_status mba_mixture_np_score_dataset(const mba_mixture* mix, const mba_dataset* ds,
                                        double* pos, size_t pos_len, double* neg,
                                        size_t neg_len) {
  if (mix == nullptr || ds == nullptr || pos == nullptr || neg == nullptr)
    return arg_error("null argument");
  if (pos_len < ds->impl.num_pos() || neg_len < ds->impl.num_neg())
    return arg_error("score buffer too small");
  return guarded([&] {
    auto [p, n] = mba::np_score_dataset(mix->impl, ds->impl);
    std::memcpy(pos, p.data(), p.size() * sizeof(double));
    std::memcpy(neg, n.data(), n.size() * sizeof(double));
  });
}

mba_status mba_mixture_np_auc(const mba_mixture* mix, size_t n_test, uint64_t seed,
                              mba_auc_report* out) {
  if (mix == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = to_c_report(mba::np_auc(mix->impl, n_test, seed)); });
}

/* --------------------------------- bounds -------------------------------- */

namespace {

mba::BoundInputs to_core_bounds(const mba_bound_inputs* inputs) {
  mba::BoundInputs b;
  b.d = inputs->d;
  b.r_x = inputs->r_x;
  b.r_w = inputs->r_w;
  b.sigma_norm = inputs->sigma_norm;
  b.epsilon = inputs->epsilon;
  b.p = inputs->p;
  return b;
}

}  // namespace

mba_status mba_required_samples(const mba_bound_inputs* inputs, uint64_t* out) {
  if (inputs == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = mba::required_samples(to_core_bounds(inputs)); });
}

mba_status mba_bernstein_tail(double gamma, uint64_t s, const mba_bound_inputs* inputs,
                              int which, double* out) {
  if (inputs == nullptr || out == nullptr) return arg_error("null argument");
  if (which != MBA_BERNSTEIN_MATRIX && which != MBA_BERNSTEIN_SCALAR)
    return arg_error("unknown Bernstein case");
  return guarded([&] {
    *out = mba::bernstein_tail(gamma, s, to_core_bounds(inputs),
                               which == MBA_BERNSTEIN_MATRIX ? mba::BernsteinCase::Matrix
                                                             : mba::BernsteinCase::Scalar);
  });
}

mba_status mba_measure_concentration(const mba_dataset* ds, double lambda1, double lambda2,
                                     const uint64_t* s_grid, size_t n_grid, uint32_t trials,
                                     uint64_t seed, unsigned n_workers,
                                     mba_concentration_record* records) {
  if (ds == nullptr || s_grid == nullptr || records == nullptr) return arg_error("null argument");
  return guarded([&] {
    const auto result = mba::measure_concentration(
        ds->impl, mba::RegularizationSpec{lambda1, lambda2},
        std::vector<std::uint64_t>(s_grid, s_grid + n_grid), trials, seed, n_workers);
    for (size_t k = 0; k < result.size(); ++k) {
      const auto& r = result[k];
      records[k] = mba_concentration_record{r.s,
                                            r.trial,
                                            r.delta_sigma_norm,
                                            r.delta_mu_norm,
                                            r.w_gap,
                                            r.objective_gap,
                                            r.delta_bound,
                                            r.w_s_sq_norm,
                                            r.r_w_implied};
    }
  });
}

mba_status mba_concentration_summarize(const mba_concentration_record* records,
                                       size_t n_records, mba_concentration_summary* summaries,
                                       size_t cap, size_t* n_out) {
  if (records == nullptr || summaries == nullptr || n_out == nullptr)
    return arg_error("null argument");
  return guarded([&] {
    std::vector<mba::ConcentrationRecord> core(n_records);
    for (size_t k = 0; k < n_records; ++k) {
      const auto& r = records[k];
      core[k] = mba::ConcentrationRecord{r.s,
                                         r.trial,
                                         r.delta_sigma_norm,
                                         r.delta_mu_norm,
                                         r.w_gap,
                                         r.objective_gap,
                                         r.delta_bound,
                                         r.w_s_sq_norm,
                                         r.r_w_implied};
    }
    const auto result = mba::summarize_concentration(core);
    *n_out = result.size();
    if (cap < result.size())
      mba::fail(mba::ErrorKind::InvalidArgument, "summary buffer too small");
    for (size_t k = 0; k < result.size(); ++k) {
      const auto& s = result[k];
      summaries[k] = mba_concentration_summary{s.s,
                                               s.median_w_gap,
                                               s.p90_w_gap,
                                               s.median_delta_sigma,
                                               s.p90_delta_sigma,
                                               s.median_delta_mu,
                                               s.median_objective_gap};
    }
  });
}

} /* extern "C" */
