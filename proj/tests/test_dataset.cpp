#include <doctest.h>
#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "core/dataset.hpp"
#include "core/error.hpp"
#include "test_util.hpp"

using namespace mba;

TEST_CASE("parse_libsvm basic format") {
  const auto ds = parse_libsvm(std::string("+1 1:0.5 3:2.0\n-1 2:1.0"));
  CHECK(ds.num_pos() == 1);
  CHECK(ds.num_neg() == 1);
  CHECK(ds.d == 3);
  CHECK(ds.positives[0].indices == std::vector<std::uint32_t>{0, 2});
  CHECK(ds.positives[0].values == std::vector<double>{0.5, 2.0});
  CHECK(ds.negatives[0].indices == std::vector<std::uint32_t>{1});
}

TEST_CASE("parse_libsvm label conventions") {
  const auto ds = parse_libsvm(std::string("1 1:1\n0 1:2\n-1 1:3\n+1 2:4"));
  CHECK(ds.num_pos() == 2);
  CHECK(ds.num_neg() == 2);
  // order preserved within each class
  CHECK(ds.positives[0].values[0] == 1.0);
  CHECK(ds.positives[1].values[0] == 4.0);
  CHECK(ds.negatives[0].values[0] == 2.0);
  CHECK(ds.negatives[1].values[0] == 3.0);

  CHECK_THROWS_WITH_AS(parse_libsvm(std::string("2 1:1")),
                       doctest::Contains("label"), Error);
}

TEST_CASE("parse_libsvm rejects malformed input with line numbers") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_libsvm(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(kind_of("+1 1:0.5\n-1 oops").find("line 2") != std::string::npos);
  CHECK(kind_of("+1 3:1 2:1").find("ascending") != std::string::npos);
  CHECK(kind_of("+1 0:1").find("1-based") != std::string::npos);
  CHECK(kind_of("+1 1:abc").find("value") != std::string::npos);
  CHECK_THROWS_AS(parse_libsvm(std::string("")), Error);
  CHECK_THROWS_AS(parse_libsvm(std::string("  \n\n")), Error);
}

TEST_CASE("parse_libsvm d override and max_d guard") {
  ParseOptions opts;
  opts.d_override = 10;
  CHECK(parse_libsvm(std::string("+1 1:1\n-1 2:1"), opts).d == 10);

  opts.d_override = 1;
  CHECK_THROWS_AS(parse_libsvm(std::string("+1 2:1\n-1 1:1"), opts), Error);

  ParseOptions capped;
  capped.max_d = 4;
  CHECK_THROWS_WITH_AS(parse_libsvm(std::string("+1 9:1\n-1 1:1"), capped),
                       doctest::Contains("max_d"), Error);
}

TEST_CASE("serialize/parse round trip on random datasets") {
  Rng rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    auto ds = testutil::random_dataset(rng, 1 + rng.uniform_index(6), 1 + rng.uniform_index(6),
                                       1 + rng.uniform_index(12));
    // stress the %.17g path with awkward magnitudes
    if (!ds.positives[0].values.empty()) {
      ds.positives[0].values[0] = 1.0 / 3.0;
      if (ds.positives[0].values.size() > 1) ds.positives[0].values[1] = 1e-17;
    }
    const auto text = serialize_libsvm(ds);
    ParseOptions opts;
    opts.d_override = ds.d;
    const auto back = parse_libsvm(text, opts);
    CHECK(testutil::datasets_equal(ds, back));
  }
}

TEST_CASE("gzip files load transparently") {
  const std::string path = testutil::temp_path("ds.libsvm.gz");
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  const std::string payload = "+1 1:0.5 3:2.0\n-1 2:1.0\n";
  gzwrite(gz, payload.data(), static_cast<unsigned>(payload.size()));
  gzclose(gz);

  const auto ds = load_libsvm_file(path);
  CHECK(ds.num_pos() == 1);
  CHECK(ds.num_neg() == 1);
  CHECK(ds.d == 3);
  std::remove(path.c_str());
}

TEST_CASE("stratified_split exact proportions and determinism") {
  Rng rng(7);
  auto ds = testutil::random_dataset(rng, 10, 30, 5);
  const SplitSpec spec{0.5, true, 99};
  const auto split1 = stratified_split(ds, spec);
  CHECK(split1.train.num_pos() == 5);
  CHECK(split1.train.num_neg() == 15);
  CHECK(split1.test.num_pos() == 5);
  CHECK(split1.test.num_neg() == 15);

  const auto split2 = stratified_split(ds, spec);
  CHECK(testutil::datasets_equal(split1.train, split2.train));
  CHECK(testutil::datasets_equal(split1.test, split2.test));
}

TEST_CASE("stratified_split keeps class proportions within one example") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n_pos = 2 + rng.uniform_index(40);
    const std::size_t n_neg = 2 + rng.uniform_index(40);
    auto ds = testutil::random_dataset(rng, n_pos, n_neg, 4);
    const double f = 0.2 + 0.6 * rng.uniform01();
    SplitResult split;
    try {
      split = stratified_split(ds, SplitSpec{f, true, static_cast<std::uint64_t>(rep)});
    } catch (const Error&) {
      continue;  // fraction emptied a tiny class; the error is the contract
    }
    // enumerate expected counts per class
    const auto expect_pos = std::llround(static_cast<double>(n_pos) * f);
    const auto expect_neg = std::llround(static_cast<double>(n_neg) * f);
    CHECK(std::llabs(static_cast<long long>(split.test.num_pos()) - expect_pos) <= 1);
    CHECK(std::llabs(static_cast<long long>(split.test.num_neg()) - expect_neg) <= 1);
    CHECK(split.train.num_pos() + split.test.num_pos() == n_pos);
    CHECK(split.train.num_neg() + split.test.num_neg() == n_neg);
  }
}

TEST_CASE("stratified_split is a partition (multiset equality)") {
  Rng rng(13);
  auto ds = testutil::random_dataset(rng, 17, 23, 6);
  const auto split = stratified_split(ds, SplitSpec{0.4, true, 5});

  auto key = [](const SparseExample& x) {
    std::string k;
    for (std::size_t i = 0; i < x.nnz(); ++i)
      k += std::to_string(x.indices[i]) + ":" + std::to_string(x.values[i]) + " ";
    return k;
  };
  std::multiset<std::string> whole, parts;
  for (const auto& x : ds.positives) whole.insert("p" + key(x));
  for (const auto& x : ds.negatives) whole.insert("n" + key(x));
  for (const auto& x : split.train.positives) parts.insert("p" + key(x));
  for (const auto& x : split.train.negatives) parts.insert("n" + key(x));
  for (const auto& x : split.test.positives) parts.insert("p" + key(x));
  for (const auto& x : split.test.negatives) parts.insert("n" + key(x));
  CHECK(whole == parts);
}

TEST_CASE("stratified_split refuses to empty a class") {
  LabeledDataset tiny;
  tiny.d = 1;
  tiny.positives.push_back({{0}, {1.0}});
  tiny.negatives.push_back({{0}, {-1.0}});
  tiny.negatives.push_back({{0}, {-2.0}});
  CHECK_THROWS_AS(stratified_split(tiny, SplitSpec{0.5, true, 1}), Error);
}

TEST_CASE("normalize_l2") {
  LabeledDataset ds;
  ds.d = 2;
  ds.positives.push_back({{0, 1}, {3.0, 4.0}});
  ds.negatives.push_back({{}, {}});  // zero vector
  const auto out = normalize_l2(ds);
  CHECK(out.positives[0].values[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.positives[0].values[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.negatives[0].values.empty());

  Rng rng(3);
  auto rand_ds = testutil::random_dataset(rng, 20, 20, 8);
  const auto norm = normalize_l2(rand_ds);
  CHECK(norm.max_squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  double max_sq = 0.0;
  for (const auto& x : norm.positives) max_sq = std::max(max_sq, x.squared_norm());
  for (const auto& x : norm.negatives) max_sq = std::max(max_sq, x.squared_norm());
  CHECK(max_sq <= 1.0 + 1e-12);
}

TEST_CASE("subsample keeps classes and is deterministic") {
  Rng rng(17);
  auto ds = testutil::random_dataset(rng, 50, 150, 6);
  const auto sub1 = subsample(ds, 0.1, 4242);
  const auto sub2 = subsample(ds, 0.1, 4242);
  CHECK(sub1.size() == 20);
  CHECK(testutil::datasets_equal(sub1, sub2));
  CHECK(sub1.num_pos() >= 1);
  CHECK(sub1.num_neg() >= 1);
  CHECK(testutil::datasets_equal(subsample(ds, 1.0, 1), ds));
}
