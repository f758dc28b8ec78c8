#include "core/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mba {

void BoundInputs::validate() const {
  if (d < 1) fail(ErrorKind::InvalidArgument, "bound inputs require d >= 1");
  if (!(r_x > 0.0) || !(r_w > 0.0) || !(sigma_norm > 0.0))
    fail(ErrorKind::InvalidArgument, "R_x, R_w, |Sigma_N| must be positive");
  if (!(epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::InvalidArgument, "p must lie in (0,1)");
}

double required_samples_matrix_branch(const BoundInputs& b) {
  return std::log(4.0 * static_cast<double>(b.d) / b.p) *
         (48.0 * b.r_w * b.r_w * b.sigma_norm + 16.0 * b.epsilon * b.r_w) * b.r_x /
         (3.0 * b.epsilon * b.epsilon);
}

double required_samples_scalar_branch(const BoundInputs& b) {
  return std::log(4.0 / b.p) *
         (48.0 * b.r_w * b.sigma_norm + 16.0 * b.epsilon * std::sqrt(b.r_x * b.r_w)) /
         (3.0 * b.epsilon * b.epsilon);
}

std::uint64_t required_samples(const BoundInputs& b) {
  b.validate();
  const double value =
      std::max(required_samples_matrix_branch(b), required_samples_scalar_branch(b));
  if (!std::isfinite(value) || value >= 9.2e18)
    fail(ErrorKind::Numeric, "required sample count overflows");
  return static_cast<std::uint64_t>(std::ceil(value));
}

double bernstein_tail(double gamma, std::uint64_t s, const BoundInputs& b, BernsteinCase which) {
  b.validate();
  if (!(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "gamma must be positive");
  if (s < 1) fail(ErrorKind::InvalidArgument, "S must be >= 1");
  double exponent, front;
  if (which == BernsteinCase::Matrix) {
    exponent = -static_cast<double>(s) * gamma * gamma /
               (4.0 * b.r_x * b.sigma_norm + (8.0 / 3.0) * gamma * b.r_x);
    front = 2.0 * static_cast<double>(b.d);
  } else {
    exponent = -static_cast<double>(s) * gamma * gamma /
               (4.0 * b.r_w * b.sigma_norm + (8.0 / 3.0) * gamma * std::sqrt(b.r_x * b.r_w));
    front = 2.0;
  }
  return std::min(1.0, front * std::exp(exponent));
}

namespace {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double l2_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double sq_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

// Delta(w) = L_S(w) - L_N(w); the regularizers cancel, leaving
// 1/2 w^T (Sigma_S - Sigma_N) w + w^T (mu_N - mu_S).
double delta_of(const std::vector<double>& w, const MomentAccumulator& sampled,
                const MomentAccumulator& exact) {
  std::vector<double> sw(w.size()), nw(w.size());
  sampled.sigma().matvec(w.data(), sw.data());
  exact.sigma().matvec(w.data(), nw.data());
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    quad += w[i] * (sw[i] - nw[i]);
    lin += w[i] * (exact.mu()[i] - sampled.mu()[i]);
  }
  return 0.5 * quad + lin;
}

}  // namespace

std::vector<ConcentrationRecord> measure_concentration(const LabeledDataset& ds,
                                                       const RegularizationSpec& reg,
                                                       const std::vector<std::uint64_t>& s_grid,
                                                       std::uint32_t trials, std::uint64_t seed,
                                                       unsigned n_workers) {
  if (reg.lambda2 <= 0.0)
    fail(ErrorKind::InvalidArgument, "concentration harness requires lambda2 > 0 (uniqueness)");
  if (trials < 1) fail(ErrorKind::InvalidArgument, "trials must be >= 1");
  if (s_grid.empty()) fail(ErrorKind::InvalidArgument, "empty S grid");

  const MomentAccumulator exact = exact_full_pair_moments(ds);
  const RankerModel reference = solve(exact, reg);
  const std::uint64_t all_pairs = exact.count();

  std::vector<ConcentrationRecord> records(s_grid.size() * trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run_one = [&](std::size_t flat) {
    const std::size_t gi = flat / trials;
    const auto trial = static_cast<std::uint32_t>(flat % trials);
    const std::uint64_t s = s_grid[gi];

    MomentAccumulator sampled =
        s == all_pairs
            ? accumulate_all_pairs(ds)
            : accumulate_sampled(ds, PairSampler{Rng::substream(seed, flat).next_u64(),
                                                 static_cast<std::size_t>(s), 1});
    const RankerModel fitted = solve(sampled, reg);

    ConcentrationRecord rec;
    rec.s = s;
    rec.trial = trial;
    rec.delta_sigma_norm = spectral_norm_diff(sampled.sigma(), exact.sigma());
    rec.delta_mu_norm = l2_norm_diff(sampled.mu(), exact.mu());
    rec.w_gap = l2_norm_diff(reference.w, fitted.w);
    rec.objective_gap =
        objective(fitted.w, exact, reg) - objective(reference.w, exact, reg);
    rec.delta_bound = delta_of(reference.w, sampled, exact) - delta_of(fitted.w, sampled, exact);
    rec.w_s_sq_norm = sq_norm(fitted.w);
    const double mu_norm = std::sqrt(sq_norm(sampled.mu()));
    rec.r_w_implied = (mu_norm / reg.lambda2) * (mu_norm / reg.lambda2);
    records[flat] = rec;
  };

  unsigned workers = n_workers != 0 ? n_workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(records.size())));

  if (workers == 1) {
    for (std::size_t flat = 0; flat < records.size(); ++flat) run_one(flat);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t flat = next.fetch_add(1);
          if (flat >= records.size()) return;
          try {
            run_one(flat);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return records;
}

std::vector<ConcentrationSummary> summarize_concentration(
    const std::vector<ConcentrationRecord>& records) {
  std::vector<std::uint64_t> grid;
  for (const auto& r : records)
    if (grid.empty() || grid.back() != r.s) grid.push_back(r.s);

  std::vector<ConcentrationSummary> out;
  for (std::uint64_t s : grid) {
    std::vector<double> w_gaps, sigmas, mus, gaps;
    for (const auto& r : records) {
      if (r.s != s) continue;
      w_gaps.push_back(r.w_gap);
      sigmas.push_back(r.delta_sigma_norm);
      mus.push_back(r.delta_mu_norm);
      gaps.push_back(r.objective_gap);
    }
    ConcentrationSummary summary;
    summary.s = s;
    summary.median_w_gap = percentile(w_gaps, 0.5);
    summary.p90_w_gap = percentile(w_gaps, 0.9);
    summary.median_delta_sigma = percentile(sigmas, 0.5);
    summary.p90_delta_sigma = percentile(sigmas, 0.9);
    summary.median_delta_mu = percentile(mus, 0.5);
    summary.median_objective_gap = percentile(gaps, 0.5);
    out.push_back(summary);
  }
  return out;
}

double sigma_spectral_norm(const MomentAccumulator& acc, double rel_tol) {
  return spectral_norm(acc.sigma(), rel_tol);
}

}  // namespace mba
