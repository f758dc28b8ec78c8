#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/packed_sym.hpp"

namespace mba {

// Zipped positive/negative pair sampler of the mini-batch scheme: round t
// draws B positive and B negative indices uniformly with replacement and pairs
// them positionally (no Cartesian product). Round substreams are derived as
// hash(seed, t), so rounds are reproducible independently of execution order.
struct PairSampler {
  std::uint64_t seed = 0;
  std::size_t batch = 1;   // B
  std::size_t rounds = 1;  // T

  std::size_t total_pairs() const { return batch * rounds; }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_round(
      std::size_t round, const LabeledDataset& ds) const;
};

// Running first/second moments of sampled pairwise differences. Stores means,
// not sums, so magnitudes stay bounded and merging is a count-weighted average.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(std::size_t d) : mu_(d, 0.0), sigma_(d) {}

  std::size_t dim() const { return mu_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& mu() const { return mu_; }
  const PackedSymmetric& sigma() const { return sigma_; }

  // Absorbs a batch of (positive index, negative index) pairs; mu and sigma
  // become the exact running means over every pair absorbed so far.
  void absorb_batch(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                    const LabeledDataset& ds);

  // Count-weighted mean merge; equivalent to absorbing b's pairs after a's.
  static MomentAccumulator merge(const MomentAccumulator& a, const MomentAccumulator& b);

  // Testing/serialization access to raw storage.
  std::vector<double>& mu_mutable() { return mu_; }
  PackedSymmetric& sigma_mutable() { return sigma_; }
  void set_count(std::uint64_t c) { count_ = c; }

 private:
  std::vector<double> mu_;
  PackedSymmetric sigma_;
  std::uint64_t count_ = 0;
};

// Runs the full sampling loop: T rounds of B pairs absorbed into a fresh
// accumulator. Deterministic given (seed, B, T).
MomentAccumulator accumulate_sampled(const LabeledDataset& ds, const PairSampler& sampler);

// Moments over all N+ x N- pairs via the class-mean identity
//   mu_N = m+ - m-,  Sigma_N = C+ + C- - m+ m-^T - m- m+^T,
// in O((N+ + N-) nnz^2) instead of enumerating pairs. count = N+ * N-.
MomentAccumulator exact_full_pair_moments(const LabeledDataset& ds);

// Enumerates every (i, j) pair through the sampling/absorb path; the slow
// reference route kept for exactness checks and the S = N+ N- case.
MomentAccumulator accumulate_all_pairs(const LabeledDataset& ds);

// Versioned JSON snapshot (d, count, mu, packed sigma) for distributed merge.
std::string accumulator_to_json(const MomentAccumulator& acc);
MomentAccumulator accumulator_from_json(const std::string& text);
void save_accumulator(const MomentAccumulator& acc, const std::string& path);
MomentAccumulator load_accumulator(const std::string& path);

}  // namespace mba
