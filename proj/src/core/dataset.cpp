#include "core/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mba {

double SparseExample::squared_norm() const {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

double SparseExample::dot(const std::vector<double>& dense) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) acc += values[k] * dense[indices[k]];
  return acc;
}

double LabeledDataset::max_squared_norm() const {
  double best = 0.0;
  for (const auto& x : positives) best = std::max(best, x.squared_norm());
  for (const auto& x : negatives) best = std::max(best, x.squared_norm());
  return best;
}

void LabeledDataset::validate() const {
  auto check = [&](const SparseExample& x, const char* cls, std::size_t row) {
    if (x.indices.size() != x.values.size())
      fail(ErrorKind::InvalidArgument, "index/value length mismatch in " + std::string(cls) +
                                           " example " + std::to_string(row));
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
      if (k > 0 && x.indices[k] <= x.indices[k - 1])
        fail(ErrorKind::InvalidArgument, "indices not strictly ascending in " + std::string(cls) +
                                             " example " + std::to_string(row));
      if (x.indices[k] >= d)
        fail(ErrorKind::Dimension, "feature index " + std::to_string(x.indices[k]) +
                                       " out of range for d=" + std::to_string(d));
    }
  };
  for (std::size_t i = 0; i < positives.size(); ++i) check(positives[i], "positive", i);
  for (std::size_t i = 0; i < negatives.size(); ++i) check(negatives[i], "negative", i);
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

LabeledDataset parse_libsvm(std::istream& in, const ParseOptions& opts) {
  LabeledDataset ds;
  ds.name = opts.name;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  bool any_example = false;
  bool any_feature = false;

  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate CRLF input.
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::istringstream ls(line);
    std::string label_tok;
    ls >> label_tok;
    char* end = nullptr;
    const double label = std::strtod(label_tok.c_str(), &end);
    if (end == label_tok.c_str() || *end != '\0')
      parse_fail(line_no, "unreadable label '" + label_tok + "'");
    bool positive;
    if (label == 1.0)
      positive = true;
    else if (label == -1.0 || label == 0.0)
      positive = false;
    else
      parse_fail(line_no, "label '" + label_tok + "' is not one of +1, 1, -1, 0");

    SparseExample x;
    std::string tok;
    long long prev_index = -1;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        parse_fail(line_no, "malformed feature token '" + tok + "'");
      const std::string idx_str = tok.substr(0, colon);
      const std::string val_str = tok.substr(colon + 1);
      end = nullptr;
      const long long raw_index = std::strtoll(idx_str.c_str(), &end, 10);
      if (end == idx_str.c_str() || *end != '\0' || raw_index < 1)
        parse_fail(line_no, "bad feature index '" + idx_str + "' (indices are 1-based)");
      end = nullptr;
      const double value = std::strtod(val_str.c_str(), &end);
      if (end == val_str.c_str() || *end != '\0')
        parse_fail(line_no, "bad feature value '" + val_str + "'");
      if (raw_index - 1 <= prev_index)
        parse_fail(line_no, "feature indices not strictly ascending at '" + tok + "'");
      prev_index = raw_index - 1;
      x.indices.push_back(static_cast<std::uint32_t>(raw_index - 1));
      x.values.push_back(value);
      max_index = std::max(max_index, static_cast<std::size_t>(raw_index - 1));
      any_feature = true;
    }
    any_example = true;
    (positive ? ds.positives : ds.negatives).push_back(std::move(x));
  }

  if (!any_example) fail(ErrorKind::Parse, "empty input: no examples found");

  ds.d = opts.d_override != 0 ? opts.d_override : (any_feature ? max_index + 1 : 0);
  if (any_feature && ds.d < max_index + 1)
    fail(ErrorKind::Dimension, "d override " + std::to_string(opts.d_override) +
                                   " is below max feature index + 1 = " +
                                   std::to_string(max_index + 1));
  if (opts.max_d != 0 && ds.d > opts.max_d)
    fail(ErrorKind::Config, "dimension " + std::to_string(ds.d) + " exceeds max_d " +
                                std::to_string(opts.max_d) +
                                "; raise max_d explicitly to allow the dense d x d moment matrix");
  return ds;
}

LabeledDataset parse_libsvm(const std::string& text, const ParseOptions& opts) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

namespace {

std::string read_gz_file(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::string content;
  char buf[1 << 16];
  int n;
  while ((n = gzread(gz, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(n));
  const bool bad = n < 0;
  gzclose(gz);
  if (bad) fail(ErrorKind::Io, "gzip read failure on '" + path + "'");
  return content;
}

}  // namespace

LabeledDataset load_libsvm_file(const std::string& path, ParseOptions opts) {
  if (opts.name.empty()) opts.name = path;
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    return parse_libsvm(read_gz_file(path), opts);
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_libsvm(in, opts);
}

void serialize_libsvm(const LabeledDataset& ds, std::ostream& out) {
  char num[64];
  auto write_example = [&](const SparseExample& x, const char* label) {
    out << label;
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
      std::snprintf(num, sizeof(num), "%.17g", x.values[k]);
      out << ' ' << (x.indices[k] + 1) << ':' << num;
    }
    out << '\n';
  };
  for (const auto& x : ds.positives) write_example(x, "+1");
  for (const auto& x : ds.negatives) write_example(x, "-1");
}

std::string serialize_libsvm(const LabeledDataset& ds) {
  std::ostringstream out;
  serialize_libsvm(ds, out);
  return out.str();
}

void save_libsvm_file(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  serialize_libsvm(ds, out);
  if (!out.good()) fail(ErrorKind::Io, "write failure on '" + path + "'");
}

namespace {

// Seeded shuffle; std::shuffle is not reproducible across standard libraries.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

std::vector<std::size_t> shuffled_range(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle_indices(idx, rng);
  return idx;
}

}  // namespace

SplitResult stratified_split(const LabeledDataset& ds, const SplitSpec& spec) {
  if (ds.positives.empty() || ds.negatives.empty())
    fail(ErrorKind::InvalidArgument, "split requires both classes nonempty");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    fail(ErrorKind::InvalidArgument, "test_fraction must lie in (0,1)");

  SplitResult out;
  out.train.d = out.test.d = ds.d;
  out.train.name = ds.name + "/train";
  out.test.name = ds.name + "/test";
  Rng rng(spec.seed);

  if (spec.stratified) {
    auto split_class = [&](const std::vector<SparseExample>& src,
                           std::vector<SparseExample>& train_dst,
                           std::vector<SparseExample>& test_dst, const char* cls) {
      const std::size_t n = src.size();
      const auto n_test = static_cast<std::size_t>(std::llround(
          static_cast<double>(n) * spec.test_fraction));
      if (n_test == 0 || n_test == n)
        fail(ErrorKind::InvalidArgument, std::string("test_fraction leaves the ") + cls +
                                             " class empty in train or test");
      auto idx = shuffled_range(n, rng);
      std::vector<bool> in_test(n, false);
      for (std::size_t k = 0; k < n_test; ++k) in_test[idx[k]] = true;
      for (std::size_t i = 0; i < n; ++i) (in_test[i] ? test_dst : train_dst).push_back(src[i]);
    };
    split_class(ds.positives, out.train.positives, out.test.positives, "positive");
    split_class(ds.negatives, out.train.negatives, out.test.negatives, "negative");
  } else {
    const std::size_t n = ds.size();
    const auto n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
    if (n_test == 0 || n_test == n)
      fail(ErrorKind::InvalidArgument, "test_fraction leaves train or test empty");
    auto idx = shuffled_range(n, rng);
    std::vector<bool> in_test(n, false);
    for (std::size_t k = 0; k < n_test; ++k) in_test[idx[k]] = true;
    for (std::size_t i = 0; i < ds.positives.size(); ++i)
      (in_test[i] ? out.test : out.train).positives.push_back(ds.positives[i]);
    for (std::size_t j = 0; j < ds.negatives.size(); ++j)
      (in_test[ds.positives.size() + j] ? out.test : out.train).negatives.push_back(ds.negatives[j]);
    if (out.train.positives.empty() || out.train.negatives.empty() ||
        out.test.positives.empty() || out.test.negatives.empty())
      fail(ErrorKind::InvalidArgument, "unstratified split emptied a class; use stratified");
  }
  return out;
}

LabeledDataset normalize_l2(const LabeledDataset& ds) {
  LabeledDataset out = ds;
  auto scale = [](std::vector<SparseExample>& xs) {
    for (auto& x : xs) {
      const double norm = std::sqrt(x.squared_norm());
      if (norm > 0.0)
        for (auto& v : x.values) v /= norm;
    }
  };
  scale(out.positives);
  scale(out.negatives);
  return out;
}

LabeledDataset subsample(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    fail(ErrorKind::InvalidArgument, "subsample fraction must lie in (0,1]");
  if (fraction == 1.0) return ds;

  const std::size_t n = ds.size();
  const auto keep =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  if (keep == 0) fail(ErrorKind::InvalidArgument, "subsample fraction keeps no examples");

  Rng rng(seed);
  auto idx = shuffled_range(n, rng);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());

  LabeledDataset out;
  out.d = ds.d;
  out.name = ds.name;
  for (std::size_t i : idx) {
    if (i < ds.positives.size())
      out.positives.push_back(ds.positives[i]);
    else
      out.negatives.push_back(ds.negatives[i - ds.positives.size()]);
  }
  if (out.positives.empty() || out.negatives.empty())
    fail(ErrorKind::InvalidArgument,
         "subsample at fraction " + std::to_string(fraction) + " emptied a class");
  return out;
}

}  // namespace mba
