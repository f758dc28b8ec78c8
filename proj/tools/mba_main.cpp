// mba: train/evaluate linear rankers by mini-batch AUC optimization, run the
// Gaussian-mixture simulation study, benchmark against gradient baselines, and
// evaluate the concentration bounds. Links only the C API.
#include <mba/mba.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "cli_support.hpp"

using cli::check;
using cli::DatasetPtr;
using cli::die;
using cli::ModelPtr;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

// Fixed indices keep per-algorithm seed derivation stable across subsets.
const std::vector<std::string> kAllAlgorithms = {"np",  "mba_l2", "mba_l1", "mba_el",
                                                 "olr", "mb_psl", "mb_phl"};

std::size_t algorithm_index(const std::string& name) {
  for (std::size_t i = 0; i < kAllAlgorithms.size(); ++i)
    if (kAllAlgorithms[i] == name) return i;
  die(cli::kExitConfig, "unknown algorithm '" + name + "' (known: np, mba_l2, mba_l1, mba_el, "
                        "olr, mb_psl, mb_phl)");
}

std::string basename_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Marker from the MBA side: "better" means the MBA runs beat this algorithm.
std::string ttest_marker(const std::vector<double>& mba_runs,
                         const std::vector<double>& other_runs) {
  if (mba_runs.size() < 2 || mba_runs.size() != other_runs.size()) return "";
  mba_ttest_result result{};
  check(mba_paired_ttest(mba_runs.data(), other_runs.data(), mba_runs.size(), &result),
        "paired t-test");
  if (!result.significant_95) return "tie";
  return result.direction > 0 ? "better" : "worse";
}

struct LearnerKnobs {
  std::size_t mba_b = 256;
  std::size_t mba_t = 128;
  double mba_lambda1 = 0.0;
  double mba_lambda2 = 1e-2;
  double olr_c = 1.0;
  std::size_t olr_epochs = 1;
  double pairwise_c = 0.1;
  std::size_t baseline_b = 64;
  std::size_t baseline_rounds = 0;  // 0: one pass
  double baseline_lambda2 = 1e-4;
};

ModelPtr train_mba(mba_dataset* train, double lambda1, double lambda2, std::size_t b,
                   std::size_t t, std::uint64_t seed) {
  mba_accumulator* acc_raw = nullptr;
  check(mba_accumulator_create(mba_dataset_dim(train), &acc_raw), "creating accumulator");
  cli::AccumulatorPtr acc(acc_raw);
  check(mba_accumulate_pairs(acc.get(), train, b, t, seed), "sampling pairs");
  mba_solve_options opts{};
  opts.lambda1 = lambda1;
  opts.lambda2 = lambda2;
  opts.seed = seed;
  mba_model* model = nullptr;
  check(mba_solve(acc.get(), &opts, &model), "solving the regularized QP");
  return ModelPtr(model);
}

ModelPtr train_one(const std::string& alg, mba_dataset* train, std::uint64_t seed,
                   const LearnerKnobs& knobs) {
  if (alg == "mba_l2")
    return train_mba(train, knobs.mba_lambda1, knobs.mba_lambda2, knobs.mba_b, knobs.mba_t,
                     seed);
  if (alg == "mba_l1") return train_mba(train, 1e-4, 1e-6, knobs.mba_b, knobs.mba_t, seed);
  if (alg == "mba_el") return train_mba(train, 5e-5, 5e-5, knobs.mba_b, knobs.mba_t, seed);

  mba_sgd_options sgd{};
  sgd.step_schedule = MBA_STEP_INV_SQRT;
  sgd.lambda2 = knobs.baseline_lambda2;
  sgd.seed = seed;
  mba_model* model = nullptr;
  if (alg == "olr") {
    sgd.c = knobs.olr_c;
    sgd.epochs = knobs.olr_epochs;
    check(mba_train_olr(train, &sgd, &model), "training olr");
  } else if (alg == "mb_psl" || alg == "mb_phl") {
    sgd.c = knobs.pairwise_c;
    sgd.batch = knobs.baseline_b;
    sgd.rounds = knobs.baseline_rounds;
    check(mba_train_pairwise(train, &sgd, alg == "mb_psl" ? MBA_LOSS_PSL : MBA_LOSS_PHL,
                             &model),
          "training " + alg);
  } else {
    die(cli::kExitConfig, "algorithm '" + alg + "' cannot be trained here");
  }
  return ModelPtr(model);
}

double eval_auc(mba_model* model, mba_dataset* test) {
  mba_auc_report report{};
  check(mba_model_eval(model, test, &report), "evaluating model");
  return report.auc;
}

json metrics_header(const std::string& command, const json& config_echo) {
  json out;
  out["format_version"] = kFormatVersion;
  out["command"] = command;
  out["config"] = config_echo;
  out["content_hash"] = cli::git_blob_sha1(config_echo.dump());
  return out;
}

std::string csv_header(const std::string& command, const json& config_echo) {
  std::string out;
  out += "# mba " + command + " format_version=" + std::to_string(kFormatVersion) + "\n";
  out += "# config " + config_echo.dump() + "\n";
  out += "# content_hash " + cli::git_blob_sha1(config_echo.dump()) + "\n";
  return out;
}

/* --------------------------------- train --------------------------------- */

struct TrainArgs {
  std::string data, out, config;
  std::size_t d_override = 0, max_d = 0;
  bool no_normalize = false, exact = false, allow_pseudo = false;
  std::size_t b = 256, t = 128;
  double lambda1 = 0.0, lambda2 = 1e-2;
  std::uint64_t seed = 0;
  std::uint64_t max_sweeps = 0;
  double kkt_tol = 0.0;
  bool seed_given = false;
};

int cmd_train(const TrainArgs& args) {
  if (!args.exact && !args.seed_given)
    die(cli::kExitConfig, "--seed is required for sampled training (or use --exact)");

  const auto start = std::chrono::steady_clock::now();
  const DatasetPtr ds =
      cli::load_dataset({args.data, args.d_override, args.max_d, args.no_normalize});

  cli::AccumulatorPtr acc;
  if (args.exact) {
    mba_accumulator* raw = nullptr;
    check(mba_accumulator_exact(ds.get(), &raw), "computing full-pair moments");
    acc.reset(raw);
  } else {
    mba_accumulator* raw = nullptr;
    check(mba_accumulator_create(mba_dataset_dim(ds.get()), &raw), "creating accumulator");
    acc.reset(raw);
    check(mba_accumulate_pairs(acc.get(), ds.get(), args.b, args.t, args.seed),
          "sampling pairs");
  }

  mba_solve_options opts{};
  opts.lambda1 = args.lambda1;
  opts.lambda2 = args.lambda2;
  opts.max_sweeps = args.max_sweeps;
  opts.kkt_tol = args.kkt_tol;
  opts.coord_tol = 0.0;
  opts.allow_pseudo = args.allow_pseudo ? 1 : 0;
  opts.seed = args.seed;
  mba_model* model_raw = nullptr;
  check(mba_solve(acc.get(), &opts, &model_raw), "solving the regularized QP");
  const ModelPtr model(model_raw);
  check(mba_model_save(model.get(), args.out.c_str()), "writing model");

  mba_model_info info{};
  check(mba_model_get_info(model.get(), &info), "reading model info");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  std::cout << "S = " << mba_accumulator_count(acc.get()) << " pairs\n"
            << "solver iterations: " << info.iters << " (KKT residual "
            << cli::fmt_double(info.residual, 3) << ")\n"
            << "wall time: " << elapsed << " ms\n"
            << "model written to " << args.out << "\n";
  return 0;
}

/* ---------------------------------- eval --------------------------------- */

struct EvalArgs {
  std::string model, data, out, config;
  std::size_t d_override = 0, max_d = 0;
  bool no_normalize = false;
};

int cmd_eval(const EvalArgs& args) {
  mba_model* model_raw = nullptr;
  check(mba_model_load(args.model.c_str(), &model_raw), "loading model");
  const ModelPtr model(model_raw);
  const DatasetPtr ds =
      cli::load_dataset({args.data, args.d_override, args.max_d, args.no_normalize});

  mba_auc_report report{};
  check(mba_model_eval(model.get(), ds.get(), &report), "evaluating model");

  json config_echo;
  config_echo["model"] = args.model;
  config_echo["data"] = args.data;
  config_echo["d_override"] = args.d_override;
  config_echo["normalize"] = !args.no_normalize;

  json out = metrics_header("eval", config_echo);
  out["auc"] = report.auc;
  out["auc_pct"] = cli::fmt_pct(report.auc);
  out["n_pos"] = report.n_pos;
  out["n_neg"] = report.n_neg;
  out["tie_mass"] = report.tie_mass;
  mba_model_info info{};
  check(mba_model_get_info(model.get(), &info), "reading model info");
  out["model"] = {{"method", info.method},
                  {"lambda1", info.lambda1},
                  {"lambda2", info.lambda2},
                  {"pairs_seen", info.pairs_seen},
                  {"seed", info.seed}};
  out["timestamp"] = cli::utc_timestamp();

  if (!args.out.empty()) cli::write_file(args.out, out.dump(2) + "\n");
  std::cout << "AUC: " << cli::fmt_pct(report.auc) << "\n";
  return 0;
}

/* ---------------------------------- roc ---------------------------------- */

struct RocArgs {
  std::string model, data, out, config;
  std::size_t d_override = 0, max_d = 0;
  bool no_normalize = false;
};

int cmd_roc(const RocArgs& args) {
  mba_model* model_raw = nullptr;
  check(mba_model_load(args.model.c_str(), &model_raw), "loading model");
  const ModelPtr model(model_raw);
  const DatasetPtr ds =
      cli::load_dataset({args.data, args.d_override, args.max_d, args.no_normalize});

  std::vector<double> pos(mba_dataset_num_pos(ds.get()));
  std::vector<double> neg(mba_dataset_num_neg(ds.get()));
  check(mba_model_score(model.get(), ds.get(), pos.data(), pos.size(), neg.data(), neg.size()),
        "scoring dataset");

  size_t n_points = 0;
  check(mba_roc_points(pos.data(), pos.size(), neg.data(), neg.size(), nullptr, 0, &n_points),
        "computing ROC size");
  std::vector<double> xy(2 * n_points);
  check(mba_roc_points(pos.data(), pos.size(), neg.data(), neg.size(), xy.data(), n_points,
                       &n_points),
        "computing ROC points");

  std::string csv = "false_alarm,detection\n";
  for (size_t k = 0; k < n_points; ++k)
    csv += cli::fmt_double(xy[2 * k], 17) + "," + cli::fmt_double(xy[2 * k + 1], 17) + "\n";
  cli::write_file(args.out, csv);
  std::cout << "wrote " << n_points << " ROC points to " << args.out << "\n";
  return 0;
}

/* -------------------------------- simulate ------------------------------- */

struct SimulateArgs {
  int k = 1;
  std::string mixture;  // custom JSON path; overrides k
  std::size_t d = 100;
  std::size_t n_train = 20000;
  std::size_t n_test = 100000;
  std::string sr = "1,10,100";
  std::size_t trials = 50;
  std::string algorithms = "np,mba_l2,olr,mb_psl";
  std::uint64_t seed = 0;
  std::string out, config;
  LearnerKnobs knobs;
};

int cmd_simulate(const SimulateArgs& args) {
  cli::MixturePtr mix;
  if (!args.mixture.empty()) {
    std::ifstream in(args.mixture);
    if (!in) die(cli::kExitData, "cannot open mixture file '" + args.mixture + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    mba_mixture* raw = nullptr;
    check(mba_mixture_from_json(text.c_str(), text.size(), &raw), "parsing mixture JSON");
    mix.reset(raw);
  } else {
    mba_mixture* raw = nullptr;
    check(mba_mixture_preset(args.k, args.d, &raw), "building preset");
    mix.reset(raw);
  }

  std::vector<double> sr_values;
  for (const auto& token : cli::split_csv_list(args.sr)) {
    const double v = std::strtod(token.c_str(), nullptr);
    if (!(v > 0.0 && v <= 100.0))
      die(cli::kExitConfig, "SR values must lie in (0, 100], got '" + token + "'");
    sr_values.push_back(v);
  }
  if (sr_values.empty()) die(cli::kExitConfig, "empty SR list");

  const auto algorithms = cli::split_csv_list(args.algorithms);
  if (algorithms.empty()) die(cli::kExitConfig, "empty algorithm list");
  bool want_np = false;
  std::vector<std::string> learners;
  for (const auto& alg : algorithms) {
    algorithm_index(alg);  // validates
    if (alg == "np")
      want_np = true;
    else
      learners.push_back(alg);
  }

  // shared test draw for the whole study
  mba_dataset* test_raw = nullptr;
  check(mba_mixture_sample(mix.get(), args.n_test, cli::derive_seed(args.seed, 0), &test_raw),
        "sampling test set");
  const DatasetPtr test(test_raw);

  double np_auc_value = 0.0;
  if (want_np) {
    std::vector<double> pos(mba_dataset_num_pos(test.get()));
    std::vector<double> neg(mba_dataset_num_neg(test.get()));
    check(mba_mixture_np_score_dataset(mix.get(), test.get(), pos.data(), pos.size(),
                                       neg.data(), neg.size()),
          "scoring test set with the NP detector");
    mba_auc_report report{};
    check(mba_auc(pos.data(), pos.size(), neg.data(), neg.size(), &report), "NP AUC");
    np_auc_value = report.auc;
  }

  // results[sr][learner][trial]
  std::vector<std::vector<std::vector<double>>> results(
      sr_values.size(), std::vector<std::vector<double>>(learners.size(),
                                                         std::vector<double>(args.trials)));

  cli::parallel_for(args.trials, cli::worker_count(args.trials), [&](std::size_t trial) {
    mba_dataset* full_raw = nullptr;
    check(mba_mixture_sample(mix.get(), args.n_train,
                             cli::derive_seed(args.seed, 1000 + trial), &full_raw),
          "sampling training set");
    const DatasetPtr full(full_raw);
    for (std::size_t sr_idx = 0; sr_idx < sr_values.size(); ++sr_idx) {
      DatasetPtr train;
      if (sr_values[sr_idx] >= 100.0) {
        // full training set; reuse the handle without copying
      } else {
        mba_dataset* sub_raw = nullptr;
        check(mba_dataset_subsample(full.get(), sr_values[sr_idx] / 100.0,
                                    cli::derive_seed(args.seed, 5000 + trial * 16 + sr_idx),
                                    &sub_raw),
              "subsampling training set");
        train.reset(sub_raw);
      }
      mba_dataset* train_view = train ? train.get() : full.get();
      for (std::size_t a = 0; a < learners.size(); ++a) {
        const std::uint64_t alg_seed = cli::derive_seed(
            args.seed, 100000 + trial * 256 + sr_idx * 16 + algorithm_index(learners[a]));
        const ModelPtr model = train_one(learners[a], train_view, alg_seed, args.knobs);
        results[sr_idx][a][trial] = eval_auc(model.get(), test.get());
      }
    }
  });

  json config_echo;
  config_echo["k"] = args.mixture.empty() ? json(args.k) : json("custom");
  config_echo["mixture"] = args.mixture;
  config_echo["d"] = args.mixture.empty() ? args.d : mba_mixture_dim(mix.get());
  config_echo["n_train"] = args.n_train;
  config_echo["n_test"] = args.n_test;
  config_echo["sr"] = sr_values;
  config_echo["trials"] = args.trials;
  config_echo["algorithms"] = algorithms;
  config_echo["seed"] = args.seed;
  config_echo["lambda1"] = args.knobs.mba_lambda1;
  config_echo["lambda2"] = args.knobs.mba_lambda2;
  config_echo["b"] = args.knobs.mba_b;
  config_echo["t"] = args.knobs.mba_t;

  std::string csv = csv_header("simulate", config_echo);
  csv += "k,d,sr_pct,algorithm,trials,mean_auc_pct,std_auc_pct,vs_mba_l2\n";
  const std::string k_label = args.mixture.empty() ? std::to_string(args.k) : "custom";
  const std::string d_label = std::to_string(mba_mixture_dim(mix.get()));
  if (want_np)
    csv += k_label + "," + d_label + ",,np,1," + cli::fmt_pct(np_auc_value) + ",0.00,\n";

  const auto mba_pos = std::find(learners.begin(), learners.end(), "mba_l2");
  for (std::size_t sr_idx = 0; sr_idx < sr_values.size(); ++sr_idx) {
    for (std::size_t a = 0; a < learners.size(); ++a) {
      const auto& runs = results[sr_idx][a];
      std::string marker;
      if (learners[a] != "mba_l2" && mba_pos != learners.end()) {
        const auto& mba_runs =
            results[sr_idx][static_cast<std::size_t>(mba_pos - learners.begin())];
        marker = ttest_marker(mba_runs, runs);
      }
      char sr_buf[32];
      std::snprintf(sr_buf, sizeof(sr_buf), "%g", sr_values[sr_idx]);
      csv += k_label + "," + d_label + "," + sr_buf + "," + learners[a] + "," +
             std::to_string(runs.size()) + "," + cli::fmt_pct(mean_of(runs)) + "," +
             cli::fmt_pct(sample_std(runs)) + "," + marker + "\n";
    }
  }
  cli::write_file(args.out, csv);
  std::cout << "wrote simulation table to " << args.out << "\n";
  return 0;
}

/* --------------------------------- bench --------------------------------- */

struct BenchArgs {
  std::string data, test, out, config, name;
  std::size_t d_override = 0, max_d = 0;
  bool no_normalize = false;
  double split_fraction = 0.5;
  std::size_t trials = 50;
  std::string algorithms = "mba_l2,mba_l1,mba_el,olr,mb_psl,mb_phl";
  std::uint64_t seed = 0;
  LearnerKnobs knobs;
};

int cmd_bench(const BenchArgs& args) {
  // raw parse here; normalization happens per split below
  mba_dataset* data_raw = nullptr;
  check(mba_dataset_load(args.data.c_str(), args.d_override, args.max_d, &data_raw),
        "loading '" + args.data + "'");
  const DatasetPtr data(data_raw);

  DatasetPtr fixed_test;
  if (!args.test.empty()) {
    // shared dimension with the training file
    const std::size_t d_shared =
        args.d_override != 0 ? args.d_override : mba_dataset_dim(data.get());
    mba_dataset* test_raw = nullptr;
    check(mba_dataset_load(args.test.c_str(), d_shared, args.max_d, &test_raw),
          "loading '" + args.test + "'");
    fixed_test.reset(test_raw);
  }

  const auto algorithms = cli::split_csv_list(args.algorithms);
  if (algorithms.empty()) die(cli::kExitConfig, "empty algorithm list");
  for (const auto& alg : algorithms) {
    algorithm_index(alg);
    if (alg == "np") die(cli::kExitConfig, "np is only available under simulate");
  }

  std::vector<std::vector<double>> results(algorithms.size(),
                                           std::vector<double>(args.trials));

  cli::parallel_for(args.trials, cli::worker_count(args.trials), [&](std::size_t trial) {
    DatasetPtr train, test;
    if (fixed_test) {
      // fixed provided split: per-trial randomness is the training sampling
      mba_dataset* norm_train = nullptr;
      mba_dataset* norm_test = nullptr;
      if (args.no_normalize) {
        // copy-free path: reuse handles read-only
      } else {
        check(mba_dataset_normalize_l2(data.get(), &norm_train), "normalizing train");
        check(mba_dataset_normalize_l2(fixed_test.get(), &norm_test), "normalizing test");
      }
      train.reset(norm_train);
      test.reset(norm_test);
    } else {
      mba_dataset* train_raw = nullptr;
      mba_dataset* test_raw = nullptr;
      check(mba_dataset_split(data.get(), args.split_fraction, 1,
                              cli::derive_seed(args.seed, 777 + trial), &train_raw, &test_raw),
            "splitting dataset");
      train.reset(train_raw);
      test.reset(test_raw);
      if (!args.no_normalize) {
        mba_dataset* norm = nullptr;
        check(mba_dataset_normalize_l2(train.get(), &norm), "normalizing train");
        train.reset(norm);
        norm = nullptr;
        check(mba_dataset_normalize_l2(test.get(), &norm), "normalizing test");
        test.reset(norm);
      }
    }
    mba_dataset* train_view = train ? train.get() : data.get();
    mba_dataset* test_view = test ? test.get() : fixed_test.get();

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const std::uint64_t alg_seed = cli::derive_seed(
          args.seed, 100000 + trial * 256 + algorithm_index(algorithms[a]));
      const ModelPtr model = train_one(algorithms[a], train_view, alg_seed, args.knobs);
      results[a][trial] = eval_auc(model.get(), test_view);
    }
  });

  json config_echo;
  config_echo["data"] = args.data;
  config_echo["test"] = args.test;
  config_echo["split_fraction"] = args.split_fraction;
  config_echo["normalize"] = !args.no_normalize;
  config_echo["trials"] = args.trials;
  config_echo["algorithms"] = algorithms;
  config_echo["seed"] = args.seed;
  config_echo["b"] = args.knobs.mba_b;
  config_echo["t"] = args.knobs.mba_t;

  const std::string dataset_label = args.name.empty() ? basename_stem(args.data) : args.name;
  std::string csv = csv_header("bench", config_echo);
  csv += "dataset,algorithm,trials,mean_auc_pct,std_auc_pct,vs_mba_l2,vs_mba_l1\n";
  auto find_runs = [&](const std::string& alg) -> const std::vector<double>* {
    for (std::size_t a = 0; a < algorithms.size(); ++a)
      if (algorithms[a] == alg) return &results[a];
    return nullptr;
  };
  const auto* l2_runs = find_runs("mba_l2");
  const auto* l1_runs = find_runs("mba_l1");
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    std::string vs_l2, vs_l1;
    if (algorithms[a] != "mba_l2" && l2_runs != nullptr)
      vs_l2 = ttest_marker(*l2_runs, results[a]);
    if (algorithms[a] != "mba_l1" && l1_runs != nullptr)
      vs_l1 = ttest_marker(*l1_runs, results[a]);
    csv += dataset_label + "," + algorithms[a] + "," + std::to_string(results[a].size()) +
           "," + cli::fmt_pct(mean_of(results[a])) + "," +
           cli::fmt_pct(sample_std(results[a])) + "," + vs_l2 + "," + vs_l1 + "\n";
  }
  cli::write_file(args.out, csv);
  std::cout << "wrote benchmark table to " << args.out << "\n";
  return 0;
}

/* --------------------------------- bound --------------------------------- */

struct BoundArgs {
  std::size_t d = 0;
  double r_x = 1.0, r_w = 0.0, sigma_norm = 0.0, epsilon = 0.0, p = 0.05;
  double gamma = 0.0;
  std::uint64_t s = 0;
  std::string out, config;
};

int cmd_bound(const BoundArgs& args) {
  mba_bound_inputs inputs{};
  inputs.d = args.d;
  inputs.r_x = args.r_x;
  inputs.r_w = args.r_w;
  inputs.sigma_norm = args.sigma_norm;
  inputs.epsilon = args.epsilon;
  inputs.p = args.p;

  uint64_t required = 0;
  check(mba_required_samples(&inputs, &required), "evaluating the sample bound");

  json config_echo;
  config_echo["d"] = args.d;
  config_echo["r_x"] = args.r_x;
  config_echo["r_w"] = args.r_w;
  config_echo["sigma_norm"] = args.sigma_norm;
  config_echo["epsilon"] = args.epsilon;
  config_echo["p"] = args.p;

  json out = metrics_header("bound", config_echo);
  out["required_samples"] = required;
  if (args.gamma > 0.0 && args.s > 0) {
    double matrix_tail = 0.0, scalar_tail = 0.0;
    check(mba_bernstein_tail(args.gamma, args.s, &inputs, MBA_BERNSTEIN_MATRIX, &matrix_tail),
          "matrix tail");
    check(mba_bernstein_tail(args.gamma, args.s, &inputs, MBA_BERNSTEIN_SCALAR, &scalar_tail),
          "scalar tail");
    out["tails"] = {{"gamma", args.gamma},
                    {"s", args.s},
                    {"matrix", matrix_tail},
                    {"scalar", scalar_tail}};
  }
  out["timestamp"] = cli::utc_timestamp();

  if (!args.out.empty()) cli::write_file(args.out, out.dump(2) + "\n");
  std::cout << "required samples S = " << required << "\n";
  if (out.contains("tails"))
    std::cout << "tails at gamma=" << args.gamma << ", S=" << args.s << ": matrix "
              << cli::fmt_double(out["tails"]["matrix"].get<double>(), 6) << ", scalar "
              << cli::fmt_double(out["tails"]["scalar"].get<double>(), 6) << "\n";
  return 0;
}

void add_learner_knobs(CLI::App* sub, cli::ConfigMerger& merge, LearnerKnobs& knobs) {
  merge.bind("b", knobs.mba_b);
  merge.bind("t", knobs.mba_t);
  merge.bind("lambda1", knobs.mba_lambda1);
  merge.bind("lambda2", knobs.mba_lambda2);
  merge.bind("olr_c", knobs.olr_c);
  merge.bind("olr_epochs", knobs.olr_epochs);
  merge.bind("pairwise_c", knobs.pairwise_c);
  merge.bind("baseline_b", knobs.baseline_b);
  merge.bind("baseline_rounds", knobs.baseline_rounds);
  merge.bind("baseline_lambda2", knobs.baseline_lambda2);
  sub->add_option("--b", knobs.mba_b, "pairs per sampling round (B)");
  sub->add_option("--t", knobs.mba_t, "sampling rounds (T)");
  sub->add_option("--lambda1", knobs.mba_lambda1, "l1 weight for mba_l2's spec");
  sub->add_option("--lambda2", knobs.mba_lambda2, "l2 weight for mba_l2's spec");
  sub->add_option("--olr-c", knobs.olr_c, "OLR step scale");
  sub->add_option("--olr-epochs", knobs.olr_epochs, "OLR passes");
  sub->add_option("--pairwise-c", knobs.pairwise_c, "MB-PSL/MB-PHL step scale");
  sub->add_option("--baseline-b", knobs.baseline_b, "baseline batch size");
  sub->add_option("--baseline-rounds", knobs.baseline_rounds,
                  "baseline rounds (0: one pass)");
  sub->add_option("--baseline-lambda2", knobs.baseline_lambda2, "baseline l2 weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mini-batch AUC optimization for linear rankers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mba_version()));

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "sample pair moments and solve the ranker QP");
  cli::ConfigMerger train_merge(train);
  train->add_option("--data", train_args.data, "LIBSVM training file (.gz ok)");
  train->add_option("--out", train_args.out, "output model JSON");
  train->add_option("--d-override", train_args.d_override, "force feature dimension");
  train->add_option("--max-d", train_args.max_d, "dimension cap (default 20000)");
  train->add_flag("--no-normalize", train_args.no_normalize, "skip per-instance L2 scaling");
  train->add_flag("--exact", train_args.exact, "use exact full-pair moments");
  train->add_flag("--allow-pseudo", train_args.allow_pseudo,
                  "minimum-norm solution for singular unregularized sigma");
  train->add_option("--b", train_args.b, "pairs per round (B)");
  train->add_option("--t", train_args.t, "rounds (T)");
  train->add_option("--lambda1", train_args.lambda1, "l1 weight");
  train->add_option("--lambda2", train_args.lambda2, "l2 weight");
  auto* train_seed = train->add_option("--seed", train_args.seed, "sampling seed");
  train->add_option("--max-sweeps", train_args.max_sweeps, "CD sweep cap (default 10000)");
  train->add_option("--kkt-tol", train_args.kkt_tol, "KKT tolerance (default 1e-8)");
  train->add_option("--config", train_args.config, "JSON config; flags override");
  train_merge.bind("data", train_args.data);
  train_merge.bind("out", train_args.out);
  train_merge.bind("d_override", train_args.d_override);
  train_merge.bind("max_d", train_args.max_d);
  train_merge.bind("no_normalize", train_args.no_normalize);
  train_merge.bind("exact", train_args.exact);
  train_merge.bind("allow_pseudo", train_args.allow_pseudo);
  train_merge.bind("b", train_args.b);
  train_merge.bind("t", train_args.t);
  train_merge.bind("lambda1", train_args.lambda1);
  train_merge.bind("lambda2", train_args.lambda2);
  train_merge.bind("seed", train_args.seed);
  train_merge.bind("max_sweeps", train_args.max_sweeps);
  train_merge.bind("kkt_tol", train_args.kkt_tol);
  train->callback([&] {
    train_merge.apply_file(train_args.config);
    train_args.seed_given = train_seed->count() > 0 || train_args.seed != 0;
    if (train_args.data.empty() || train_args.out.empty())
      die(cli::kExitConfig, "train requires --data and --out");
    std::exit(cmd_train(train_args));
  });

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score a dataset and report AUC");
  cli::ConfigMerger eval_merge(eval);
  eval->add_option("--model", eval_args.model, "model JSON");
  eval->add_option("--data", eval_args.data, "LIBSVM file");
  eval->add_option("--out", eval_args.out, "metrics JSON path");
  eval->add_option("--d-override", eval_args.d_override, "force feature dimension");
  eval->add_option("--max-d", eval_args.max_d, "dimension cap");
  eval->add_flag("--no-normalize", eval_args.no_normalize, "skip per-instance L2 scaling");
  eval->add_option("--config", eval_args.config, "JSON config; flags override");
  eval_merge.bind("model", eval_args.model);
  eval_merge.bind("data", eval_args.data);
  eval_merge.bind("out", eval_args.out);
  eval_merge.bind("d_override", eval_args.d_override);
  eval_merge.bind("max_d", eval_args.max_d);
  eval_merge.bind("no_normalize", eval_args.no_normalize);
  eval->callback([&] {
    eval_merge.apply_file(eval_args.config);
    if (eval_args.model.empty() || eval_args.data.empty())
      die(cli::kExitConfig, "eval requires --model and --data");
    std::exit(cmd_eval(eval_args));
  });

  RocArgs roc_args;
  auto* roc = app.add_subcommand("roc", "emit the ROC sweep as CSV");
  cli::ConfigMerger roc_merge(roc);
  roc->add_option("--model", roc_args.model, "model JSON");
  roc->add_option("--data", roc_args.data, "LIBSVM file");
  roc->add_option("--out", roc_args.out, "CSV path");
  roc->add_option("--d-override", roc_args.d_override, "force feature dimension");
  roc->add_option("--max-d", roc_args.max_d, "dimension cap");
  roc->add_flag("--no-normalize", roc_args.no_normalize, "skip per-instance L2 scaling");
  roc->add_option("--config", roc_args.config, "JSON config; flags override");
  roc_merge.bind("model", roc_args.model);
  roc_merge.bind("data", roc_args.data);
  roc_merge.bind("out", roc_args.out);
  roc_merge.bind("d_override", roc_args.d_override);
  roc_merge.bind("max_d", roc_args.max_d);
  roc_merge.bind("no_normalize", roc_args.no_normalize);
  roc->callback([&] {
    roc_merge.apply_file(roc_args.config);
    if (roc_args.model.empty() || roc_args.data.empty() || roc_args.out.empty())
      die(cli::kExitConfig, "roc requires --model, --data, --out");
    std::exit(cmd_roc(roc_args));
  });

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Gaussian-mixture study with the NP oracle");
  cli::ConfigMerger sim_merge(sim);
  sim->add_option("--k", sim_args.k, "preset mixture components (1, 2, or 3)");
  sim->add_option("--mixture", sim_args.mixture, "custom mixture JSON (overrides --k)");
  sim->add_option("--d", sim_args.d, "feature dimension");
  sim->add_option("--n-train", sim_args.n_train, "training draw size");
  sim->add_option("--n-test", sim_args.n_test, "test draw size");
  sim->add_option("--sr", sim_args.sr, "sample-ratio sweep, percent (comma list)");
  sim->add_option("--trials", sim_args.trials, "independent training sets");
  sim->add_option("--algorithms", sim_args.algorithms, "comma list incl. np");
  auto* sim_seed = sim->add_option("--seed", sim_args.seed, "base seed");
  sim->add_option("--out", sim_args.out, "CSV path");
  sim->add_option("--config", sim_args.config, "JSON config; flags override");
  sim_merge.bind("k", sim_args.k);
  sim_merge.bind("mixture", sim_args.mixture);
  sim_merge.bind("d", sim_args.d);
  sim_merge.bind("n_train", sim_args.n_train);
  sim_merge.bind("n_test", sim_args.n_test);
  sim_merge.bind("sr", sim_args.sr);
  sim_merge.bind("trials", sim_args.trials);
  sim_merge.bind("algorithms", sim_args.algorithms);
  sim_merge.bind("seed", sim_args.seed);
  sim_merge.bind("out", sim_args.out);
  add_learner_knobs(sim, sim_merge, sim_args.knobs);
  sim->callback([&] {
    sim_merge.apply_file(sim_args.config);
    if (sim_seed->count() == 0 && sim_args.seed == 0)
      die(cli::kExitConfig, "simulate requires --seed");
    if (sim_args.out.empty()) die(cli::kExitConfig, "simulate requires --out");
    std::exit(cmd_simulate(sim_args));
  });

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "benchmark algorithms on a LIBSVM dataset");
  cli::ConfigMerger bench_merge(bench);
  bench->add_option("--data", bench_args.data, "LIBSVM file (.gz ok)");
  bench->add_option("--test", bench_args.test, "fixed test file (else 50/50 split per seed)");
  bench->add_option("--name", bench_args.name, "dataset label for the CSV");
  bench->add_option("--d-override", bench_args.d_override, "force feature dimension");
  bench->add_option("--max-d", bench_args.max_d, "dimension cap");
  bench->add_flag("--no-normalize", bench_args.no_normalize, "skip per-instance L2 scaling");
  bench->add_option("--split-fraction", bench_args.split_fraction, "test fraction");
  bench->add_option("--trials", bench_args.trials, "seeds / repetitions");
  bench->add_option("--algorithms", bench_args.algorithms, "comma list (no np)");
  auto* bench_seed = bench->add_option("--seed", bench_args.seed, "base seed");
  bench->add_option("--out", bench_args.out, "CSV path");
  bench->add_option("--config", bench_args.config, "JSON config; flags override");
  bench_merge.bind("data", bench_args.data);
  bench_merge.bind("test", bench_args.test);
  bench_merge.bind("name", bench_args.name);
  bench_merge.bind("d_override", bench_args.d_override);
  bench_merge.bind("max_d", bench_args.max_d);
  bench_merge.bind("no_normalize", bench_args.no_normalize);
  bench_merge.bind("split_fraction", bench_args.split_fraction);
  bench_merge.bind("trials", bench_args.trials);
  bench_merge.bind("algorithms", bench_args.algorithms);
  bench_merge.bind("seed", bench_args.seed);
  bench_merge.bind("out", bench_args.out);
  add_learner_knobs(bench, bench_merge, bench_args.knobs);
  bench->callback([&] {
    bench_merge.apply_file(bench_args.config);
    if (bench_seed->count() == 0 && bench_args.seed == 0)
      die(cli::kExitConfig, "bench requires --seed");
    if (bench_args.data.empty() || bench_args.out.empty())
      die(cli::kExitConfig, "bench requires --data and --out");
    std::exit(cmd_bench(bench_args));
  });

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "evaluate the sample-size and tail bounds");
  cli::ConfigMerger bound_merge(bound);
  bound->add_option("--d", bound_args.d, "feature dimension");
  bound->add_option("--rx", bound_args.r_x, "data norm bound R_x");
  bound->add_option("--rw", bound_args.r_w, "weight norm bound R_w");
  bound->add_option("--sigma-norm", bound_args.sigma_norm, "|Sigma_N|_2");
  bound->add_option("--epsilon", bound_args.epsilon, "objective gap");
  bound->add_option("--p", bound_args.p, "failure probability");
  bound->add_option("--gamma", bound_args.gamma, "tail threshold (with --s)");
  bound->add_option("--s", bound_args.s, "tail sample size (with --gamma)");
  bound->add_option("--out", bound_args.out, "JSON path");
  bound->add_option("--config", bound_args.config, "JSON config; flags override");
  bound_merge.bind("d", bound_args.d);
  bound_merge.bind("rx", bound_args.r_x);
  bound_merge.bind("rw", bound_args.r_w);
  bound_merge.bind("sigma_norm", bound_args.sigma_norm);
  bound_merge.bind("epsilon", bound_args.epsilon);
  bound_merge.bind("p", bound_args.p);
  bound_merge.bind("gamma", bound_args.gamma);
  bound_merge.bind("s", bound_args.s);
  bound_merge.bind("out", bound_args.out);
  bound->callback([&] {
    bound_merge.apply_file(bound_args.config);
    if (bound_args.d == 0 || bound_args.r_w <= 0.0 || bound_args.sigma_norm <= 0.0 ||
        bound_args.epsilon <= 0.0)
      die(cli::kExitConfig, "bound requires --d, --rw, --sigma-norm, --epsilon");
    std::exit(cmd_bound(bound_args));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return cli::kExitConfig;
  }
  return 0;
}
