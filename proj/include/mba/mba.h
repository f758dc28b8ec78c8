/*
 * mba: mini-batch AUC optimization for linear rankers.
 *
 * C API over the core library: opaque handles, integer status codes, and a
 * thread-local error message. All functions returning mba_status leave their
 * outputs untouched on failure; handles are freed with the matching *_free.
 */
#ifndef MBA_H
#define MBA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MBA_API __declspec(dllexport)
#else
#define MBA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mba_status {
  MBA_OK = 0,
  MBA_ERR_INVALID_ARGUMENT = 1,
  MBA_ERR_PARSE = 2,
  MBA_ERR_IO = 3,
  MBA_ERR_DIMENSION = 4,
  MBA_ERR_NUMERIC = 5,
  MBA_ERR_CONFIG = 6,
} mba_status;

typedef struct mba_dataset mba_dataset;
typedef struct mba_accumulator mba_accumulator;
typedef struct mba_model mba_model;
typedef struct mba_mixture mba_mixture;

MBA_API const char* mba_version(void);

/* Message for the most recent failure on the calling thread. */
MBA_API const char* mba_last_error(void);

/* ---------------- datasets (LIBSVM text, sparse, binary labels) ---------- */

/* d_override 0 infers d = max index + 1; max_d 0 keeps the default cap of
 * 20000 on the dense d x d second-moment matrix. ".gz" paths are inflated. */
MBA_API mba_status mba_dataset_load(const char* path, size_t d_override, size_t max_d,
                                    mba_dataset** out);
MBA_API mba_status mba_dataset_parse(const char* text, size_t len, size_t d_override,
                                     size_t max_d, mba_dataset** out);
MBA_API mba_status mba_dataset_save(const mba_dataset* ds, const char* path);
MBA_API void mba_dataset_free(mba_dataset* ds);

MBA_API size_t mba_dataset_num_pos(const mba_dataset* ds);
MBA_API size_t mba_dataset_num_neg(const mba_dataset* ds);
MBA_API size_t mba_dataset_dim(const mba_dataset* ds);
MBA_API mba_status mba_dataset_max_squared_norm(const mba_dataset* ds, double* out);

/* Copies one example's sparse entries; query nnz first with indices == NULL. */
MBA_API mba_status mba_dataset_example(const mba_dataset* ds, int positive, size_t row,
                                       uint32_t* indices, double* values, size_t cap,
                                       size_t* nnz);

MBA_API mba_status mba_dataset_split(const mba_dataset* ds, double test_fraction,
                                     int stratified, uint64_t seed, mba_dataset** train,
                                     mba_dataset** test);
MBA_API mba_status mba_dataset_normalize_l2(const mba_dataset* ds, mba_dataset** out);

/* Uniform subsample without replacement over the pooled examples. */
MBA_API mba_status mba_dataset_subsample(const mba_dataset* ds, double fraction, uint64_t seed,
                                         mba_dataset** out);

/* ------------- moment accumulators (U-statistics over pair draws) -------- */

MBA_API mba_status mba_accumulator_create(size_t d, mba_accumulator** out);
MBA_API void mba_accumulator_free(mba_accumulator* acc);

/* Absorbs rounds x batch zipped positive/negative pairs sampled uniformly
 * with replacement; deterministic given (seed, batch, rounds). */
MBA_API mba_status mba_accumulate_pairs(mba_accumulator* acc, const mba_dataset* ds,
                                        size_t batch, size_t rounds, uint64_t seed);

/* Full-pair moments via the class-mean identity (count = N+ N-). */
MBA_API mba_status mba_accumulator_exact(const mba_dataset* ds, mba_accumulator** out);

/* Full-pair moments by explicit enumeration through the absorb path. */
MBA_API mba_status mba_accumulator_all_pairs(const mba_dataset* ds, mba_accumulator** out);

/* Count-weighted mean merge; equals one accumulator that saw both streams. */
MBA_API mba_status mba_accumulator_merge(const mba_accumulator* a, const mba_accumulator* b,
                                         mba_accumulator** out);

MBA_API uint64_t mba_accumulator_count(const mba_accumulator* acc);
MBA_API size_t mba_accumulator_dim(const mba_accumulator* acc);
MBA_API mba_status mba_accumulator_mu(const mba_accumulator* acc, double* buf, size_t len);
/* Dense row-major d x d copy of sigma. */
MBA_API mba_status mba_accumulator_sigma(const mba_accumulator* acc, double* buf, size_t len);

/* Versioned JSON snapshot for the distributed-merge use case. */
MBA_API mba_status mba_accumulator_save(const mba_accumulator* acc, const char* path);
MBA_API mba_status mba_accumulator_load(const char* path, mba_accumulator** out);

/* |Sigma|_2 by power iteration. */
MBA_API mba_status mba_sigma_spectral_norm(const mba_accumulator* acc, double* out);

/* --------------------- elastic-net quadratic solver ---------------------- */

typedef struct mba_solve_options {
  double lambda1;
  double lambda2;
  double kkt_tol;      /* <= 0: default 1e-8 */
  double coord_tol;    /* <= 0: default 1e-8 */
  uint64_t max_sweeps; /* 0: default 10000 */
  int allow_pseudo;    /* minimum-norm solution for singular sigma, l1 = l2 = 0 */
  uint64_t seed;       /* metadata recorded in the model */
} mba_solve_options;

/* Coordinate descent on 1/2 w'Sw - w'mu + l1|w|_1 + l2/2 |w|_2^2. */
MBA_API mba_status mba_solve(const mba_accumulator* acc, const mba_solve_options* options,
                             mba_model** out);

/* Closed-form ridge path: (Sigma + lambda2 I) w = mu by Cholesky. */
MBA_API mba_status mba_solve_ridge(const mba_accumulator* acc, double lambda2, mba_model** out);

MBA_API mba_status mba_objective(const mba_accumulator* acc, const double* w, size_t d,
                                 double lambda1, double lambda2, double* out);
MBA_API mba_status mba_kkt_residual(const mba_accumulator* acc, const double* w, size_t d,
                                    double lambda1, double lambda2, double* out);

/* ------------------------------- models ---------------------------------- */

typedef struct mba_model_info {
  double lambda1;
  double lambda2;
  double objective_value; /* NaN when not applicable (gradient baselines) */
  double residual;        /* KKT residual; NaN for gradient baselines */
  double step_c;          /* NaN for quadratic solves */
  uint64_t pairs_seen;
  uint64_t seed;
  uint64_t iters;
  uint64_t rounds;
  char method[32];
  char step_schedule[16];
} mba_model_info;

MBA_API void mba_model_free(mba_model* model);
MBA_API size_t mba_model_dim(const mba_model* model);
MBA_API mba_status mba_model_weights(const mba_model* model, double* buf, size_t len);
MBA_API mba_status mba_model_get_info(const mba_model* model, mba_model_info* out);
MBA_API mba_status mba_model_save(const mba_model* model, const char* path);
MBA_API mba_status mba_model_load(const char* path, mba_model** out);

/* ----------------------- stochastic-gradient baselines ------------------- */

typedef enum mba_step_schedule {
  MBA_STEP_INV_SQRT = 0, /* eta_t = c / sqrt(t) */
  MBA_STEP_CONSTANT = 1, /* eta_t = c */
} mba_step_schedule;

typedef enum mba_pairwise_loss {
  MBA_LOSS_PSL = 0, /* (1 - t)^2 */
  MBA_LOSS_PHL = 1, /* max(0, 1 - t) */
} mba_pairwise_loss;

typedef struct mba_sgd_options {
  int step_schedule; /* mba_step_schedule */
  double c;          /* <= 0: default 1.0 */
  size_t epochs;     /* OLR passes; 0: default 1 */
  size_t rounds;     /* pairwise rounds; 0: ceil(n / batch) */
  size_t batch;      /* 0: default 64 */
  double lambda2;
  uint64_t seed;
} mba_sgd_options;

MBA_API mba_status mba_train_olr(const mba_dataset* ds, const mba_sgd_options* options,
                                 mba_model** out);
MBA_API mba_status mba_train_pairwise(const mba_dataset* ds, const mba_sgd_options* options,
                                      int loss, mba_model** out);

/* ------------------------------ evaluation ------------------------------- */

typedef struct mba_auc_report {
  double auc;
  size_t n_pos;
  size_t n_neg;
  double tie_mass; /* fraction of pairs counted at 1/2 */
} mba_auc_report;

typedef struct mba_ttest_result {
  double t_stat;
  size_t dof;
  int significant_95;
  int direction;  /* +1: a significantly above b, -1: below, 0: tie */
  int infinite_t; /* zero variance with nonzero mean difference */
} mba_ttest_result;

/* Ties between positive and negative scores count 1/2. */
MBA_API mba_status mba_auc(const double* pos, size_t n_pos, const double* neg, size_t n_neg,
                           mba_auc_report* out);

/* Sparse linear scores for both classes; buffer lengths must match counts. */
MBA_API mba_status mba_model_score(const mba_model* model, const mba_dataset* ds, double* pos,
                                   size_t pos_len, double* neg, size_t neg_len);

/* score + auc in one call. */
MBA_API mba_status mba_model_eval(const mba_model* model, const mba_dataset* ds,
                                  mba_auc_report* out);

/* ROC sweep points as (false_alarm, detection) pairs packed x0,y0,x1,y1,...
 * Query the point count first with xy == NULL. */
MBA_API mba_status mba_roc_points(const double* pos, size_t n_pos, const double* neg,
                                  size_t n_neg, double* xy, size_t cap_points,
                                  size_t* n_points);

MBA_API mba_status mba_paired_ttest(const double* a, const double* b, size_t n,
                                    mba_ttest_result* out);

/* ---------------- Gaussian-mixture simulation and NP oracle -------------- */

/* The three symmetric presets (k components, identity covariances, 90%
 * negatives) used by the simulation study. */
MBA_API mba_status mba_mixture_preset(int k, size_t d, mba_mixture** out);

/* Custom pair from JSON: {"imbalance": .., "h0": {"d": .., "components":
 * [{"weight": .., "mean": [..], "variance": ..} | {"covariance": [[..]..]}]},
 * "h1": {..}}. */
MBA_API mba_status mba_mixture_from_json(const char* text, size_t len, mba_mixture** out);
MBA_API void mba_mixture_free(mba_mixture* mix);
MBA_API size_t mba_mixture_dim(const mba_mixture* mix);

MBA_API mba_status mba_mixture_sample(const mba_mixture* mix, size_t n, uint64_t seed,
                                      mba_dataset** out);

/* log p1(x) - log p0(x) for a dense point. */
MBA_API mba_status mba_mixture_np_score(const mba_mixture* mix, const double* x, size_t d,
                                        double* out);
MBA_API mba_status mba_mixture_np_score_dataset(const mba_mixture* mix, const mba_dataset* ds,
                                                double* pos, size_t pos_len, double* neg,
                                                size_t neg_len);

/* Monte-Carlo AUC of the NP detector on a fresh draw. */
MBA_API mba_status mba_mixture_np_auc(const mba_mixture* mix, size_t n_test, uint64_t seed,
                                      mba_auc_report* out);

/* -------------------- concentration theory and bounds -------------------- */

typedef struct mba_bound_inputs {
  size_t d;
  double r_x;        /* |x|_2^2 <= R_x */
  double r_w;        /* weight norm bound */
  double sigma_norm; /* |Sigma_N|_2 */
  double epsilon;    /* objective gap */
  double p;          /* failure probability */
} mba_bound_inputs;

typedef enum mba_bernstein_case {
  MBA_BERNSTEIN_MATRIX = 0,
  MBA_BERNSTEIN_SCALAR = 1,
} mba_bernstein_case;

/* Samples sufficient for |w_N - w_S| <= delta w.p. >= 1 - p. */
MBA_API mba_status mba_required_samples(const mba_bound_inputs* inputs, uint64_t* out);

/* Exponential tail bound on P(|Delta| > gamma) at sample size s, in [0,1]. */
MBA_API mba_status mba_bernstein_tail(double gamma, uint64_t s, const mba_bound_inputs* inputs,
                                      int which, double* out);

typedef struct mba_concentration_record {
  uint64_t s;
  uint32_t trial;
  double delta_sigma_norm; /* |Sigma_S - Sigma_N|_2 */
  double delta_mu_norm;    /* |mu_S - mu_N|_2 */
  double w_gap;            /* |w_N - w_S|_2 */
  double objective_gap;    /* L_N(w_S) - L_N(w_N), nonnegative */
  double delta_bound;      /* Delta(w_N) - Delta(w_S) */
  double w_s_sq_norm;
  double r_w_implied;      /* (|mu_S|_2 / lambda2)^2 */
} mba_concentration_record;

typedef struct mba_concentration_summary {
  uint64_t s;
  double median_w_gap;
  double p90_w_gap;
  double median_delta_sigma;
  double p90_delta_sigma;
  double median_delta_mu;
  double median_objective_gap;
} mba_concentration_summary;

/* Fills records[n_grid * trials], ordered by grid point then trial. An s equal
 * to N+ N- enumerates the full pair ensemble instead of sampling. n_workers 0
 * uses the hardware concurrency; results are order-deterministic regardless. */
MBA_API mba_status mba_measure_concentration(const mba_dataset* ds, double lambda1,
                                             double lambda2, const uint64_t* s_grid,
                                             size_t n_grid, uint32_t trials, uint64_t seed,
                                             unsigned n_workers,
                                             mba_concentration_record* records);

/* Per-grid-point medians and 90th percentiles; summaries must hold one entry
 * per distinct s in records (record order). */
MBA_API mba_status mba_concentration_summarize(const mba_concentration_record* records,
                                               size_t n_records,
                                               mba_concentration_summary* summaries, size_t cap,
                                               size_t* n_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MBA_H */
