#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "mlbalance/errors.hpp"
#include "mlbalance/neighbors.hpp"
#include "testkit.hpp"

using namespace mlbalance;
using testkit::numericDataset;

namespace {

Dataset nominalToy() {
  // colour: r, g, b, unused ; labels a, b
  std::vector<FeatureSpec> f{FeatureSpec::nominal("colour", {"r", "g", "b", "unused"})};
  std::vector<Instance> rows{
      {{0}, LabelSet(2, {0})},
      {{0}, LabelSet(2, {0, 1})},
      {{1}, LabelSet(2, {1})},
      {{2}, LabelSet(2, {0})},
  };
  return buildDataset("nominal", f, {"a", "b"}, rows);
}

}  // namespace

TEST_CASE("VDM table") {
  SUBCASE("all-numeric data gives an empty table") {
    CHECK(buildVdmTable(numericDataset({{0}, {1}}, {{0}, {}}, 1)).empty());
  }
  SUBCASE("hand count") {
    auto vdm = buildVdmTable(nominalToy());
    REQUIRE_FALSE(vdm.empty());
    CHECK(vdm.occurrences(0, 0) == 2);
    CHECK(vdm.probability(0, 0, 0) == 1.0);
    CHECK(vdm.probability(0, 0, 1) == 0.5);
    CHECK(vdm.probability(0, 1, 0) == 0.0);
    CHECK(vdm.probability(0, 1, 1) == 1.0);
    CHECK(vdm.probability(0, 2, 0) == 1.0);
    CHECK(vdm.probability(0, 2, 1) == 0.0);
    CHECK(vdm.occurrences(0, 3) == 0);
    CHECK(vdm.probability(0, 3, 0) == 0.0);
    CHECK(vdm.valueDistance(0, 0, 1) == doctest::Approx(1.0 + 0.25));
  }
  SUBCASE("values with identical label distributions") {
    std::vector<FeatureSpec> f{FeatureSpec::nominal("c", {"x", "y"})};
    std::vector<Instance> rows{{{0}, LabelSet(1, {0})}, {{1}, LabelSet(1, {0})}};
    auto vdm = buildVdmTable(buildDataset("d", f, {"l"}, rows));
    CHECK(vdm.probability(0, 0, 0) == vdm.probability(0, 1, 0));
    CHECK(vdm.valueDistance(0, 0, 1) == 0.0);
  }
}

TEST_CASE("distance") {
  SUBCASE("identical values") {
    auto d = numericDataset({{1, 2}, {1, 2}, {0, 0}}, {{}, {}, {}}, 1);
    CHECK(distance(d, 0, 1, buildVdmTable(d)) == 0.0);
  }
  SUBCASE("normalized numeric differences") {
    auto d = numericDataset({{0, 0}, {3, 4}}, {{}, {}}, 1);
    CHECK(distance(d, 0, 1, buildVdmTable(d)) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("constant feature contributes nothing") {
    auto d = numericDataset({{5, 0}, {5, 2}}, {{}, {}}, 1);
    CHECK(distance(d, 0, 1, buildVdmTable(d)) == 1.0);
  }
  SUBCASE("nominal term") {
    std::vector<FeatureSpec> f{FeatureSpec::nominal("c", {"x", "y"})};
    std::vector<Instance> rows{{{0}, LabelSet(1, {0})}, {{1}, LabelSet(1)}};
    auto d = buildDataset("d", f, {"l"}, rows);
    CHECK(distance(d, 0, 1, buildVdmTable(d)) == 1.0);
  }
  SUBCASE("metric axioms and oracle agreement") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto d = testkit::makeSynthetic(testkit::randomSpec(seed, 40));
      auto vdm = buildVdmTable(d);
      for (std::size_t a = 0; a < d.size(); ++a) {
        CHECK(distance(d, a, a, vdm) == 0.0);
        for (std::size_t b = a + 1; b < d.size(); ++b) {
          const double ab = distance(d, a, b, vdm);
          CHECK(ab == distance(d, b, a, vdm));
          CHECK(ab >= 0.0);
          CHECK(ab == testkit::oracleDistance(d, a, b));
        }
      }
    }
  }
}

TEST_CASE("neighbor cache") {
  SUBCASE("collinear points") {
    auto d = numericDataset({{0}, {1}, {10}}, {{}, {}, {}}, 1);
    auto cache = buildNeighborCache(d, buildVdmTable(d));
    CHECK(std::vector<std::uint32_t>(cache.ranking(0).begin(), cache.ranking(0).end()) ==
          std::vector<std::uint32_t>{1, 2});
    CHECK(cache.complete());
    CHECK(cache.distances(0)[0] == doctest::Approx(0.1));
  }
  SUBCASE("ties break on the lower index") {
    auto d = numericDataset({{0}, {1}, {1}, {1}}, {{}, {}, {}, {}}, 1);
    auto cache = buildNeighborCache(d, buildVdmTable(d));
    CHECK(std::vector<std::uint32_t>(cache.ranking(0).begin(), cache.ranking(0).end()) ==
          std::vector<std::uint32_t>{1, 2, 3});
    CHECK(std::vector<std::uint32_t>(cache.ranking(2).begin(), cache.ranking(2).end()) ==
          std::vector<std::uint32_t>{1, 3, 0});
  }
  SUBCASE("insufficient instances") {
    auto d = numericDataset({{0}}, {{}}, 1);
    CHECK_THROWS_AS((void)buildNeighborCache(d, buildVdmTable(d)), CacheError);
  }
  SUBCASE("depth beyond n-1") {
    auto d = numericDataset({{0}, {1}}, {{}, {}}, 1);
    CacheOptions opt;
    opt.depth = 2;
    CHECK_THROWS_AS((void)buildNeighborCache(d, buildVdmTable(d), opt), CacheError);
  }
  SUBCASE("matches the brute-force oracle on 50-instance data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto spec = testkit::randomSpec(seed, 50);
      spec.instances = 50;
      auto d = testkit::makeSynthetic(spec);
      auto cache = buildNeighborCache(d, buildVdmTable(d));
      for (std::size_t i = 0; i < d.size(); ++i) {
        const auto expected = testkit::bruteForceRanking(d, i);
        const auto row = cache.ranking(i);
        REQUIRE(std::equal(row.begin(), row.end(), expected.begin(), expected.end()));
        for (std::size_t k = 1; k < d.size(); k += 7) {
          CHECK(knn(cache, i, k) == testkit::bruteForceKnn(d, i, k));
        }
      }
    }
  }
  SUBCASE("thread count does not change the cache") {
    auto spec = testkit::randomSpec(3, 150);
    spec.instances = 150;
    spec.numericLevels = 3;
    auto d = testkit::makeSynthetic(spec);
    auto vdm = buildVdmTable(d);
    const auto one = buildNeighborCache(d, vdm);
    for (unsigned t : {2U, 3U, 8U}) {
      CacheOptions opt;
      opt.threads = t;
      CHECK(buildNeighborCache(d, vdm, opt) == one);
    }
  }
  SUBCASE("progress reaches completion") {
    auto d = testkit::makeSynthetic(testkit::randomSpec(4, 60));
    for (unsigned t : {1U, 4U}) {
      CacheOptions opt;
      opt.threads = t;
      double last = 0.0;
      bool monotone = true;
      opt.progress = [&](double f) {
        if (f < last) monotone = false;
        last = f;
      };
      (void)buildNeighborCache(d, buildVdmTable(d), opt);
      CHECK(monotone);
      CHECK(last == 1.0);
    }
  }
  SUBCASE("sidecar round trip and fingerprint checks") {
    auto d = testkit::makeSynthetic(testkit::randomSpec(5, 40));
    auto cache = buildNeighborCache(d, buildVdmTable(d));
    const auto path = std::filesystem::temp_directory_path() / "mlbalance_test_cache.bin";
    cache.save(path);
    auto loaded = NeighborCache::load(path);
    CHECK(loaded == cache);
    CHECK_NOTHROW(loaded.verify(d));
    const std::vector<std::size_t> removals{0};
    CHECK_THROWS_AS(loaded.verify(editInstances(d, removals)), CacheError);
    {
      std::ofstream out(path, std::ios::binary);
      out << "garbage";
    }
    CHECK_THROWS_AS((void)NeighborCache::load(path), CacheError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("knn and reverse neighbors") {
  auto d = numericDataset({{0}, {1}, {3}, {7}, {20}}, {{}, {}, {}, {}, {}}, 1);
  auto cache = buildNeighborCache(d, buildVdmTable(d));

  SUBCASE("full ranking") { CHECK(knn(cache, 0, 4) == std::vector<std::size_t>{1, 2, 3, 4}); }
  SUBCASE("bag of only i") {
    const std::vector<std::size_t> members{2};
    const auto bag = makeBag(d.size(), members);
    CHECK(knn(cache, 2, 3, &bag).empty());
  }
  SUBCASE("bag-restricted query") {
    const std::vector<std::size_t> members{0, 2, 4};
    const auto bag = makeBag(d.size(), members);
    CHECK(knn(cache, 0, 1, &bag) == std::vector<std::size_t>{2});
    CHECK(knn(cache, 0, 5, &bag) == std::vector<std::size_t>{2, 4});
  }
  SUBCASE("hand-computed reverse adjacency, k = 1") {
    // 1-NN: 0->1, 1->0, 2->1, 3->2, 4->3
    const auto rev = reverseNeighbors(cache, 1);
    CHECK(rev[0] == std::vector<std::size_t>{1});
    CHECK(rev[1] == std::vector<std::size_t>{0, 2});
    CHECK(rev[2] == std::vector<std::size_t>{3});
    CHECK(rev[3] == std::vector<std::size_t>{4});
    CHECK(rev[4].empty());
  }
  SUBCASE("mutual pair") {
    auto pair = numericDataset({{0}, {1}}, {{}, {}}, 1);
    auto c2 = buildNeighborCache(pair, buildVdmTable(pair));
    const auto rev = reverseNeighbors(c2, 1);
    CHECK(rev[0] == std::vector<std::size_t>{1});
    CHECK(rev[1] == std::vector<std::size_t>{0});
  }
}

TEST_CASE("bag-restricted queries match the within-bag oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto d = testkit::makeSynthetic(testkit::randomSpec(seed, 80));
    auto vdm = buildVdmTable(d);
    auto cache = buildNeighborCache(d, vdm);
    CacheOptions shallow;
    shallow.depth = 3;
    auto truncated = buildNeighborCache(d, vdm, shallow);

    NeighborSearch direct(d);
    NeighborSearch cached(d, {&vdm, &cache});
    NeighborSearch partial(d, {&vdm, &truncated});
    for (std::size_t l = 0; l < d.labelCount(); ++l) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.instance(i).labels.test(l)) members.push_back(i);
      }
      const auto bag = makeBag(d.size(), members);
      for (auto i : members) {
        const auto expected = testkit::bruteForceKnnInBag(d, i, 5, members);
        CHECK(direct.knn(i, 5, bag) == expected);
        CHECK(cached.knn(i, 5, bag) == expected);
        CHECK(partial.knn(i, 5, bag) == expected);
      }
      CHECK(direct.reverseNeighbors(3, bag) == cached.reverseNeighbors(3, bag));
      CHECK(partial.reverseNeighbors(3, bag) == cached.reverseNeighbors(3, bag));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(direct.knn(i, 4) == cached.knn(i, 4));
      CHECK(partial.knn(i, 4) == cached.knn(i, 4));
    }
  }
}

TEST_CASE("NeighborSearch rejects a cache for another dataset") {
  auto a = numericDataset({{0}, {1}, {2}}, {{}, {}, {}}, 1);
  auto b = numericDataset({{0}, {1}, {5}}, {{}, {}, {}}, 1);
  auto vdm = buildVdmTable(a);
  auto cache = buildNeighborCache(a, vdm);
  CHECK_THROWS_AS(NeighborSearch(b, {&vdm, &cache}), CacheError);
}
