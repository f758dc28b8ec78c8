#pragma once

#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/rng.hpp"

namespace mba::testutil {

// Random sparse dataset with indices covering [0, d): every feature id is used
// somewhere, so d is recoverable from the serialized form.
inline LabeledDataset random_dataset(Rng& rng, std::size_t n_pos, std::size_t n_neg,
                                     std::size_t d, double density = 0.6) {
  LabeledDataset ds;
  ds.d = d;
  ds.name = "random";
  auto make_example = [&] {
    SparseExample x;
    for (std::size_t i = 0; i < d; ++i) {
      if (rng.uniform01() < density) {
        x.indices.push_back(static_cast<std::uint32_t>(i));
        x.values.push_back(2.0 * rng.uniform01() - 1.0);
      }
    }
    return x;
  };
  for (std::size_t i = 0; i < n_pos; ++i) ds.positives.push_back(make_example());
  for (std::size_t j = 0; j < n_neg; ++j) ds.negatives.push_back(make_example());
  // Pin the top index so d = max index + 1 holds.
  if (ds.positives[0].indices.empty() || ds.positives[0].indices.back() != d - 1) {
    ds.positives[0].indices.push_back(static_cast<std::uint32_t>(d - 1));
    ds.positives[0].values.push_back(1.0);
  }
  return ds;
}

inline bool examples_equal(const SparseExample& a, const SparseExample& b) {
  return a.indices == b.indices && a.values == b.values;
}

inline bool datasets_equal(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.d != b.d || a.num_pos() != b.num_pos() || a.num_neg() != b.num_neg()) return false;
  for (std::size_t i = 0; i < a.num_pos(); ++i)
    if (!examples_equal(a.positives[i], b.positives[i])) return false;
  for (std::size_t j = 0; j < a.num_neg(); ++j)
    if (!examples_equal(a.negatives[j], b.negatives[j])) return false;
  return true;
}

inline std::string temp_path(const std::string& stem) {
  return std::string("mba_test_") + stem;
}

}  // namespace mba::testutil
