#include "core/moments.hpp"

#include <fstream>
#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mba {

namespace {

// z = a - b on sorted sparse supports; output buffers are reused per pair.
void sparse_diff(const SparseExample& a, const SparseExample& b,
                 std::vector<std::uint32_t>& idx, std::vector<double>& val) {
  idx.clear();
  val.clear();
  std::size_t ka = 0, kb = 0;
  while (ka < a.indices.size() || kb < b.indices.size()) {
    if (kb == b.indices.size() || (ka < a.indices.size() && a.indices[ka] < b.indices[kb])) {
      idx.push_back(a.indices[ka]);
      val.push_back(a.values[ka]);
      ++ka;
    } else if (ka == a.indices.size() || b.indices[kb] < a.indices[ka]) {
      idx.push_back(b.indices[kb]);
      val.push_back(-b.values[kb]);
      ++kb;
    } else {
      idx.push_back(a.indices[ka]);
      val.push_back(a.values[ka] - b.values[kb]);
      ++ka;
      ++kb;
    }
  }
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> PairSampler::sample_round(
    std::size_t round, const LabeledDataset& ds) const {
  if (ds.positives.empty() || ds.negatives.empty())
    fail(ErrorKind::InvalidArgument, "pair sampling requires both classes nonempty");
  Rng rng = Rng::substream(seed, round);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(batch);
  // Positive indices first, then negative, matching the two index-set
  // constructions of the algorithm; pairs are zipped positionally.
  for (auto& p : pairs) p.first = static_cast<std::uint32_t>(rng.uniform_index(ds.num_pos()));
  for (auto& p : pairs) p.second = static_cast<std::uint32_t>(rng.uniform_index(ds.num_neg()));
  return pairs;
}

void MomentAccumulator::absorb_batch(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
    const LabeledDataset& ds) {
  if (pairs.empty()) return;
  if (dim() != ds.d) fail(ErrorKind::Dimension, "accumulator dimension does not match dataset");
  for (const auto& [i, j] : pairs)
    if (i >= ds.num_pos() || j >= ds.num_neg())
      fail(ErrorKind::InvalidArgument, "pair index out of range");

  const double batch_n = static_cast<double>(pairs.size());
  const double total = static_cast<double>(count_) + batch_n;
  const double keep = static_cast<double>(count_) / total;
  const double w = 1.0 / total;

  if (count_ > 0) {
    for (auto& v : mu_) v *= keep;
    sigma_.scale(keep);
  }

  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (const auto& [i, j] : pairs) {
    sparse_diff(ds.positives[i], ds.negatives[j], idx, val);
    for (std::size_t k = 0; k < idx.size(); ++k) mu_[idx[k]] += w * val[k];
    sigma_.rank1_update(idx, val, w);
  }
  count_ += pairs.size();
}

MomentAccumulator MomentAccumulator::merge(const MomentAccumulator& a,
                                           const MomentAccumulator& b) {
  if (a.dim() != b.dim())
    fail(ErrorKind::Dimension, "cannot merge accumulators of dimension " +
                                   std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  if (a.count_ == 0) return b;
  if (b.count_ == 0) return a;

  const double total = static_cast<double>(a.count_) + static_cast<double>(b.count_);
  const double wa = static_cast<double>(a.count_) / total;
  const double wb = static_cast<double>(b.count_) / total;

  MomentAccumulator out(a.dim());
  for (std::size_t i = 0; i < out.mu_.size(); ++i) out.mu_[i] = wa * a.mu_[i] + wb * b.mu_[i];
  out.sigma_ = a.sigma_;
  out.sigma_.scale(wa);
  out.sigma_.axpy(wb, b.sigma_);
  out.count_ = a.count_ + b.count_;
  return out;
}

MomentAccumulator accumulate_sampled(const LabeledDataset& ds, const PairSampler& sampler) {
  if (sampler.batch < 1 || sampler.rounds < 1)
    fail(ErrorKind::InvalidArgument, "sampler requires B >= 1 and T >= 1");
  MomentAccumulator acc(ds.d);
  for (std::size_t t = 0; t < sampler.rounds; ++t)
    acc.absorb_batch(sampler.sample_round(t, ds), ds);
  return acc;
}

MomentAccumulator exact_full_pair_moments(const LabeledDataset& ds) {
  if (ds.positives.empty() || ds.negatives.empty())
    fail(ErrorKind::InvalidArgument, "full-pair moments require both classes nonempty");
  const std::size_t d = ds.d;

  std::vector<double> mean_pos(d, 0.0), mean_neg(d, 0.0);
  PackedSymmetric cov_pos(d), cov_neg(d);

  const double wp = 1.0 / static_cast<double>(ds.num_pos());
  for (const auto& x : ds.positives) {
    for (std::size_t k = 0; k < x.nnz(); ++k) mean_pos[x.indices[k]] += wp * x.values[k];
    cov_pos.rank1_update(x.indices, x.values, wp);
  }
  const double wn = 1.0 / static_cast<double>(ds.num_neg());
  for (const auto& x : ds.negatives) {
    for (std::size_t k = 0; k < x.nnz(); ++k) mean_neg[x.indices[k]] += wn * x.values[k];
    cov_neg.rank1_update(x.indices, x.values, wn);
  }

  MomentAccumulator acc(d);
  auto& mu = acc.mu_mutable();
  for (std::size_t i = 0; i < d; ++i) mu[i] = mean_pos[i] - mean_neg[i];

  auto& sigma = acc.sigma_mutable();
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j, ++k)
      sigma.data()[k] = cov_pos.data()[k] + cov_neg.data()[k] - mean_pos[i] * mean_neg[j] -
                        mean_neg[i] * mean_pos[j];

  acc.set_count(static_cast<std::uint64_t>(ds.num_pos()) *
                static_cast<std::uint64_t>(ds.num_neg()));
  return acc;
}

MomentAccumulator accumulate_all_pairs(const LabeledDataset& ds) {
  if (ds.positives.empty() || ds.negatives.empty())
    fail(ErrorKind::InvalidArgument, "pair enumeration requires both classes nonempty");
  MomentAccumulator acc(ds.d);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> batch;
  batch.reserve(ds.num_neg());
  for (std::uint32_t i = 0; i < ds.num_pos(); ++i) {
    batch.clear();
    for (std::uint32_t j = 0; j < ds.num_neg(); ++j) batch.emplace_back(i, j);
    acc.absorb_batch(batch, ds);
  }
  return acc;
}

std::string accumulator_to_json(const MomentAccumulator& acc) {
  nlohmann::json j;
  j["format"] = "mba.accumulator";
  j["version"] = 1;
  j["d"] = acc.dim();
  j["count"] = acc.count();
  j["mu"] = acc.mu();
  j["sigma_packed_upper"] = acc.sigma().data();
  return j.dump();
}

MomentAccumulator accumulator_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Parse, "accumulator snapshot is not valid JSON");
  if (j.value("format", "") != "mba.accumulator" || j.value("version", 0) != 1)
    fail(ErrorKind::Parse, "unrecognized accumulator snapshot format/version");
  const auto d = j.at("d").get<std::size_t>();
  MomentAccumulator acc(d);
  acc.mu_mutable() = j.at("mu").get<std::vector<double>>();
  acc.sigma_mutable().data() = j.at("sigma_packed_upper").get<std::vector<double>>();
  if (acc.mu().size() != d || acc.sigma().data().size() != d * (d + 1) / 2)
    fail(ErrorKind::Parse, "accumulator snapshot arrays do not match d");
  acc.set_count(j.at("count").get<std::uint64_t>());
  return acc;
}

void save_accumulator(const MomentAccumulator& acc, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << accumulator_to_json(acc) << '\n';
  if (!out.good()) fail(ErrorKind::Io, "write failure on '" + path + "'");
}

MomentAccumulator load_accumulator(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return accumulator_from_json(text);
}

}  // namespace mba
