#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mba {

// One labeled instance as sorted (index, value) pairs. Indices are 0-based,
// strictly ascending, and all below the owning dataset's dimension.
struct SparseExample {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double squared_norm() const;
  double dot(const std::vector<double>& dense) const;
};

// Positive/negative partitioned collection. Immutable after construction and
// freely shareable across threads.
struct LabeledDataset {
  std::vector<SparseExample> positives;
  std::vector<SparseExample> negatives;
  std::size_t d = 0;
  std::string name;

  std::size_t num_pos() const { return positives.size(); }
  std::size_t num_neg() const { return negatives.size(); }
  std::size_t size() const { return positives.size() + negatives.size(); }
  double max_squared_norm() const;

  // Throws if any example violates the ascending-index / in-dimension rules.
  void validate() const;
};

struct SplitSpec {
  double test_fraction = 0.5;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct ParseOptions {
  std::size_t d_override = 0;  // 0: infer d = max index + 1
  std::size_t max_d = 20000;   // guard for the dense d x d second-moment matrix
  std::string name;
};

// LIBSVM text: `<label> <idx>:<val> ...` with 1-based indices; labels +1/1 map
// to positive, 0/-1 to negative, anything else is an error.
LabeledDataset parse_libsvm(std::istream& in, const ParseOptions& opts = {});
LabeledDataset parse_libsvm(const std::string& text, const ParseOptions& opts = {});

// Reads a file; transparently inflates when the name ends in ".gz".
LabeledDataset load_libsvm_file(const std::string& path, ParseOptions opts = {});

// Writes 1-based indices with round-trip-safe ("%.17g") values.
void serialize_libsvm(const LabeledDataset& ds, std::ostream& out);
std::string serialize_libsvm(const LabeledDataset& ds);
void save_libsvm_file(const LabeledDataset& ds, const std::string& path);

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
};

// Deterministic given spec.seed; per-class proportions preserved within one
// example when stratified. Errors if a class would become empty on either side.
SplitResult stratified_split(const LabeledDataset& ds, const SplitSpec& spec);

// Per-example L2 normalization; zero vectors pass through unchanged.
LabeledDataset normalize_l2(const LabeledDataset& ds);

// Uniform subsample without replacement over the pooled examples (the SR sweep
// mechanism). Errors if the requested fraction empties a class.
LabeledDataset subsample(const LabeledDataset& ds, double fraction, std::uint64_t seed);

}  // namespace mba
