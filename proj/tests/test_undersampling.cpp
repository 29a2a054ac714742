#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mlbalance/errors.hpp"
#include "mlbalance/metrics.hpp"
#include "mlbalance/neighbors.hpp"
#include "mlbalance/undersampling.hpp"
#include "testkit.hpp"

using namespace mlbalance;
using testkit::numericDataset;

namespace {

Dataset bagsOfSizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<std::size_t>> y;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    for (std::size_t i = 0; i < sizes[b]; ++i) {
      x.push_back({static_cast<double>(x.size())});
      y.push_back({b});
    }
  }
  return numericDataset(x, y, sizes.size());
}

std::vector<std::size_t> keptIndices(const Dataset& out, const Dataset& in) {
  std::vector<std::size_t> kept;
  REQUIRE(testkit::isSubsequence(out, in, &kept));
  return kept;
}

double hamming(const LabelSet& a, const LabelSet& b) {
  std::size_t differ = 0;
  std::size_t active = 0;
  for (std::size_t l = 0; l < a.width(); ++l) {
    differ += a.test(l) != b.test(l) ? 1 : 0;
    active += (a.test(l) ? 1 : 0) + (b.test(l) ? 1 : 0);
  }
  return active == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(active);
}

std::vector<std::size_t> removedBy(const Dataset& in, const std::vector<std::size_t>& kept) {
  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!std::binary_search(kept.begin(), kept.end(), i)) removed.push_back(i);
  }
  return removed;
}

// Instances are tagged by a unique first feature so subsequence matching is exact.
std::vector<std::size_t> mlulOracle(const Dataset& d, double percentage, std::size_t k) {
  const std::size_t n = d.size();
  const std::size_t labels = d.labelCount();
  std::vector<std::size_t> counts(labels, 0);
  for (const auto& inst : d.instances()) {
    for (std::size_t l = 0; l < labels; ++l) counts[l] += inst.labels.test(l) ? 1 : 0;
  }
  std::vector<bool> minorityValue(labels);
  for (std::size_t l = 0; l < labels; ++l) minorityValue[l] = counts[l] <= n - counts[l];

  std::vector<std::size_t> hits(n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    for (auto i : testkit::bruteForceKnn(d, q, k)) {
      for (std::size_t l = 0; l < labels; ++l) {
        const bool qv = d.instance(q).labels.test(l);
        if (qv == minorityValue[l] && d.instance(i).labels.test(l) != qv) ++hits[i];
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hits[a] != hits[b] ? hits[a] > hits[b] : a > b;
  });
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * percentage / 100.0));
  std::vector<std::size_t> removed;
  for (auto i : order) {
    if (removed.size() == target) break;
    bool sole = false;
    for (std::size_t l = 0; l < labels; ++l) {
      if (d.instance(i).labels.test(l) && counts[l] == 1) sole = true;
    }
    if (sole) continue;
    removed.push_back(i);
    for (std::size_t l = 0; l < labels; ++l) counts[l] -= d.instance(i).labels.test(l) ? 1 : 0;
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

std::vector<std::size_t> mlennOracle(const Dataset& d, double ht, std::size_t k) {
  const auto p = testkit::recountMetrics(d);
  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool minority = false;
    for (auto l : p.minorityLabels) minority = minority || d.instance(i).labels.test(l);
    if (minority) continue;
    std::size_t differing = 0;
    for (auto j : testkit::bruteForceKnn(d, i, k)) {
      if (hamming(d.instance(i).labels, d.instance(j).labels) > ht) ++differing;
    }
    if (2 * differing >= k) removed.push_back(i);
  }
  return removed;
}

std::vector<std::size_t> mltlOracle(const Dataset& d, double ht) {
  const auto p = testkit::recountMetrics(d);
  auto pure = [&](std::size_t i) {
    for (auto l : p.minorityLabels) {
      if (d.instance(i).labels.test(l)) return false;
    }
    return true;
  };
  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = testkit::bruteForceKnn(d, i, 1).front();
    if (testkit::bruteForceKnn(d, j, 1).front() != i) continue;
    if (hamming(d.instance(i).labels, d.instance(j).labels) < ht) continue;
    if (pure(i)) removed.push_back(i);
  }
  return removed;
}

}  // namespace

TEST_CASE("adjusted Hamming") {
  CHECK(adjustedHamming(LabelSet(3, {0, 1}), LabelSet(3, {0, 1})) == 0.0);
  CHECK(adjustedHamming(LabelSet(3, {0}), LabelSet(3, {1})) == 1.0);
  CHECK(adjustedHamming(LabelSet(3, {0, 1}), LabelSet(3, {1, 2})) == 0.5);
  CHECK(adjustedHamming(LabelSet(3), LabelSet(3)) == 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto d = testkit::makeSynthetic(testkit::randomSpec(seed, 30));
    for (const auto& a : d.instances()) {
      for (const auto& b : d.instances()) {
        const double v = adjustedHamming(a.labels, b.labels);
        CHECK(v == adjustedHamming(b.labels, a.labels));
        CHECK(v == hamming(a.labels, b.labels));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("LPRUS") {
  Rng rng(2);
  SUBCASE("zero target") {
    auto d = bagsOfSizes({6, 3, 1});
    CHECK(lprus(d, 1, rng) == d);
  }
  SUBCASE("equal bags") {
    auto d = bagsOfSizes({4, 4, 4});
    CHECK(lprus(d, 50, rng) == d);
  }
  SUBCASE("one big bag and 40 singletons") {
    std::vector<std::size_t> sizes{60};
    sizes.resize(41, 1);
    auto d = bagsOfSizes(sizes);
    auto out = lprus(d, 10, rng);
    REQUIRE(out.size() == 90);
    const auto counts = labelCounts(out);
    CHECK(counts[0] == 50);
    for (std::size_t l = 1; l < counts.size(); ++l) CHECK(counts[l] == 1);
    keptIndices(out, d);
  }
  SUBCASE("floor at ceil(mean)") {
    // mean 10/3, floor 4: the big bag may lose only 2.
    auto d = bagsOfSizes({6, 3, 1});
    auto out = lprus(d, 50, rng);
    CHECK(labelCounts(out) == std::vector<std::size_t>{4, 3, 1});
  }
  SUBCASE("percentage must be below 100") {
    CHECK_THROWS_AS((void)lprus(bagsOfSizes({2, 1}), 100, rng), AlgorithmError);
  }
}

TEST_CASE("MLRUS") {
  Rng rng(4);
  SUBCASE("every instance carries a minority label") {
    auto d = numericDataset({{0}, {1}, {2}, {3}}, {{0, 1}, {0, 1}, {0, 1}, {0}}, 2);
    // counts a:4 b:3 -> irlbl b = 1.33 > 1.17; all instances but 3 carry b.
    auto out = mlrus(d, 50, rng);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.instance(i) == d.instance(i));
  }
  SUBCASE("uniform counts") {
    auto d = bagsOfSizes({3, 3, 3});
    CHECK(mlrus(d, 30, rng) == d);
  }
  SUBCASE("toy17 deletes only pure a or pure b instances") {
    auto d = testkit::toy17();
    for (std::uint64_t s = 1; s <= 20; ++s) {
      Rng r(s);
      auto out = mlrus(d, 50, r);
      const auto kept = keptIndices(out, d);
      for (auto i : removedBy(d, kept)) {
        const auto& y = d.instance(i).labels;
        CHECK((y == LabelSet(3, {0}) || y == LabelSet(3, {1})));
      }
      CHECK(labelCounts(out)[2] == 2);
      CHECK(d.size() - out.size() <= 9);
    }
  }
}

TEST_CASE("MLeNN") {
  SUBCASE("one shared labelset") {
    auto d = bagsOfSizes({8});
    CHECK(mlenn(d, 0.5, 3) == d);
  }
  SUBCASE("8-instance hand evaluation") {
    auto d = numericDataset({{0}, {1}, {2}, {3}, {10}, {11}, {12}, {13}},
                            {{0}, {0}, {0}, {1}, {1}, {1}, {0}, {1, 2}}, 3);
    auto out = mlenn(d, 0.5, 3);
    CHECK(removedBy(d, keptIndices(out, d)) == std::vector<std::size_t>{3, 6});
    CHECK(mlennOracle(d, 0.5, 3) == std::vector<std::size_t>{3, 6});
  }
  SUBCASE("oracle agreement") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      auto spec = testkit::randomSpec(seed, 80);
      spec.numericLevels = 0;
      auto d = testkit::makeSynthetic(spec);
      for (double ht : {0.3, 0.5, 0.9}) {
        auto out = mlenn(d, ht, 3);
        CHECK(removedBy(d, keptIndices(out, d)) == mlennOracle(d, ht, 3));
      }
    }
  }
  SUBCASE("argument checks") {
    auto d = bagsOfSizes({2, 1});
    CHECK_THROWS_AS((void)mlenn(d, 0.5, 3), AlgorithmError);
    CHECK_THROWS_AS((void)mlenn(d, 0.0, 1), AlgorithmError);
    CHECK_THROWS_AS((void)mlenn(d, 1.5, 1), AlgorithmError);
  }
}

TEST_CASE("MLTL") {
  SUBCASE("identical labelsets") {
    auto d = bagsOfSizes({6});
    CHECK(mltl(d, 0.5) == d);
  }
  SUBCASE("6-instance hand enumeration") {
    auto d = numericDataset({{0}, {1}, {5}, {6}, {20}, {22}}, {{0}, {2}, {0}, {0, 1}, {1}, {0}}, 3);
    auto out = mltl(d, 0.5);
    CHECK(removedBy(d, keptIndices(out, d)) == std::vector<std::size_t>{0, 4, 5});
    CHECK(mltlOracle(d, 0.5) == std::vector<std::size_t>{0, 4, 5});
  }
  SUBCASE("oracle agreement") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      auto spec = testkit::randomSpec(seed, 80);
      spec.numericLevels = 0;
      auto d = testkit::makeSynthetic(spec);
      for (double ht : {0.3, 0.5, 1.0}) {
        auto out = mltl(d, ht);
        CHECK(removedBy(d, keptIndices(out, d)) == mltlOracle(d, ht));
      }
    }
  }
}

TEST_CASE("MLUL") {
  Rng rng(1);
  SUBCASE("zero target") {
    auto d = bagsOfSizes({6, 3, 1});
    CHECK(mlul(d, 1, 2, rng) == d);
  }
  SUBCASE("10-instance crafted set") {
    auto d = numericDataset({{0}, {1}, {2}, {3}, {4}, {10}, {11}, {12}, {13}, {30}},
                            {{0}, {0}, {1}, {0}, {0}, {1}, {1}, {0}, {1}, {0, 1}}, 2);
    auto out = mlul(d, 20, 2, rng);
    const auto removed = removedBy(d, keptIndices(out, d));
    CHECK(removed == mlulOracle(d, 20, 2));
    CHECK(removed.size() == 2);
  }
  SUBCASE("isolated instance is removed last") {
    // Instance 4 is nobody's neighbor.
    auto d = numericDataset({{0}, {1}, {2}, {3}, {100}}, {{0}, {1}, {0}, {1}, {0}}, 2);
    auto out = mlul(d, 60, 1, rng);
    CHECK(out.instance(out.size() - 1) == d.instance(4));
  }
  SUBCASE("never deletes the last carrier of a label") {
    auto d = numericDataset({{0}, {1}, {2}, {3}}, {{0}, {1}, {0}, {0}}, 2);
    auto out = mlul(d, 75, 1, rng);
    CHECK(labelCounts(out)[1] == 1);
  }
  SUBCASE("oracle agreement") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      auto spec = testkit::randomSpec(seed, 80);
      spec.numericLevels = 0;  // unique rows keep subsequence matching exact
      auto d = testkit::makeSynthetic(spec);
      auto out = mlul(d, 25, 3, rng);
      CHECK(removedBy(d, keptIndices(out, d)) == mlulOracle(d, 25, 3));
    }
  }
}

TEST_CASE("undersamplers: cache presence and minority preservation") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto d = testkit::makeSynthetic(testkit::randomSpec(seed, 80));
    auto vdm = buildVdmTable(d);
    auto cache = buildNeighborCache(d, vdm);
    const SharedStructures shared{&vdm, &cache};
    const auto profile = computeProfile(d);

    auto enn = mlenn(d, 0.5, 3, shared);
    auto tl = mltl(d, 0.5, shared);
    Rng a(seed);
    Rng b(seed);
    auto ul = mlul(d, 25, 3, a, shared);
    CHECK(enn == mlenn(d, 0.5, 3));
    CHECK(tl == mltl(d, 0.5));
    CHECK(ul == mlul(d, 25, 3, b));
    Rng c(seed);
    auto rus = mlrus(d, 25, c);

    for (const auto* out : {&enn, &tl, &rus}) {
      CHECK(testkit::isSubsequence(*out, d));
      const auto counts = labelCounts(*out);
      for (auto l : profile.minorityLabels) CHECK(counts[l] == profile.counts[l]);
    }
    const auto ulCounts = labelCounts(ul);
    for (std::size_t l = 0; l < d.labelCount(); ++l) {
      if (profile.counts[l] > 0) CHECK(ulCounts[l] > 0);
    }
  }
}
