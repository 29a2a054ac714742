#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mlbalance/algorithms.hpp"
#include "mlbalance/arff.hpp"
#include "mlbalance/batch.hpp"
#include "mlbalance/random.hpp"
#include "testkit.hpp"

using namespace mlbalance;
namespace fs = std::filesystem;

namespace {

std::vector<AlgorithmSpec> allSpecs() {
  std::vector<AlgorithmSpec> specs;
  for (auto a : kAllAlgorithms) specs.push_back(makeSpec(a));
  return specs;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("configureParallel") {
  CHECK(configureParallel(1, 8) == 1);
  CHECK(configureParallel(0, 8) == 8);
  CHECK(configureParallel(9999, 8) == 8);
  CHECK(configureParallel(3, 8) == 3);
  CHECK(configureParallel(0, 0) == 1);
  CHECK(configureParallel(0) == availableCores());
}

TEST_CASE("batch output equals single runs under derived seeds") {
  auto d = testkit::makeSynthetic(testkit::randomSpec(21, 90));
  const auto specs = allSpecs();
  BatchOptions options;
  options.seed = 1234;
  options.writeOutputs = false;
  options.keepResults = true;
  const auto report = runBatch(d, specs, options);
  REQUIRE(report.entries.size() == specs.size());
  CHECK(report.neighborsBuilt);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& e = report.entries[i];
    INFO(e.algorithm);
    if (!e.ok) {
      // MLSOL may legitimately find nothing difficult.
      CHECK(e.algorithm == "MLSOL");
      continue;
    }
    const auto single = applyAlgorithm(specs[i], d, deriveSeed(1234, e.algorithm));
    CHECK(*e.result == single);
    CHECK(e.instancesBefore == d.size());
    CHECK(e.instancesAfter == single.size());
    CHECK(e.seconds >= 0.0);
  }
  CHECK(report.vdmSeconds >= 0.0);
  CHECK(report.cacheSeconds >= 0.0);
}

TEST_CASE("thread count does not change outputs") {
  auto d = testkit::makeSynthetic(testkit::randomSpec(22, 90));
  const auto specs = allSpecs();
  BatchOptions options;
  options.writeOutputs = false;
  options.keepResults = true;
  const auto one = runBatch(d, specs, options);
  options.threads = 4;
  const auto four = runBatch(d, specs, options);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(one.entries[i].ok == four.entries[i].ok);
    if (one.entries[i].ok) CHECK(*one.entries[i].result == *four.entries[i].result);
  }
}

TEST_CASE("cache is skipped when nothing needs neighbors") {
  auto d = testkit::toy17();
  std::vector<AlgorithmSpec> specs{makeSpec(Algorithm::MLROS), makeSpec(Algorithm::MLRUS)};
  std::ostringstream log;
  BatchOptions options;
  options.writeOutputs = false;
  options.log = &log;
  const auto report = runBatch(d, specs, options);
  CHECK_FALSE(report.neighborsBuilt);
  CHECK(log.str().find("neighbor cache") == std::string::npos);
}

TEST_CASE("the four-algorithm batch writes four files and builds one cache") {
  const auto dir = fs::temp_directory_path() / "mlbalance_test_batch";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto d = testkit::makeSynthetic(testkit::randomSpec(23, 90));
  std::vector<AlgorithmSpec> specs{makeSpec(Algorithm::MLROS), makeSpec(Algorithm::MLRUS),
                                   makeSpec(Algorithm::MLeNN), makeSpec(Algorithm::MLSOL)};
  std::ostringstream log;
  BatchOptions options;
  options.outputDir = dir;
  options.baseName = "synthetic";
  options.log = &log;
  const auto report = runBatch(d, specs, options);
  const auto text = log.str();
  CHECK(count(text, "Building neighbor cache") == 1);
  CHECK(count(text, "Building VDM table") == 1);
  CHECK(count(text, "reusing precomputed neighbors") == 2);
  for (const auto& e : report.entries) {
    if (!e.ok) continue;
    CHECK(fs::exists(e.output));
    CHECK(fs::exists(fs::path(e.output).replace_extension(".xml")));
  }
  CHECK(fs::exists(dir / "synthetic_MLROS_P=25.arff"));
  CHECK(fs::exists(dir / "synthetic_MLeNN_k=3_threshold=0.5.arff"));

  std::ostringstream table;
  printReport(table, report);
  for (const auto& e : report.entries) CHECK(table.str().find(e.algorithm) != std::string::npos);

  const auto written = readDataset({dir / "synthetic_MLROS_P=25.arff", std::nullopt, std::nullopt});
  CHECK(written.name() == "synthetic_MLROS_P=25");
  fs::remove_all(dir);
}

TEST_CASE("failures are recorded and the rest still run") {
  // One instance: the cache cannot be built, so neighbor algorithms fail.
  auto d = testkit::numericDataset({{0}}, {{0}}, 1);
  std::vector<AlgorithmSpec> specs{makeSpec(Algorithm::MLSMOTE), makeSpec(Algorithm::MLROS),
                                   makeSpec(Algorithm::REMEDIAL)};
  BatchOptions options;
  options.writeOutputs = false;
  const auto report = runBatch(d, specs, options);
  REQUIRE(report.entries.size() == 3);
  CHECK_FALSE(report.entries[0].ok);
  CHECK(report.entries[0].error.find("insufficient instances") != std::string::npos);
  CHECK(report.entries[1].ok);
  CHECK(report.entries[2].ok);
  CHECK(report.anyFailed());
}

TEST_CASE("cache file is saved, then reused") {
  const auto dir = fs::temp_directory_path() / "mlbalance_test_cachefile";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto d = testkit::makeSynthetic(testkit::randomSpec(24, 60));
  std::vector<AlgorithmSpec> specs{makeSpec(Algorithm::MLTL)};
  BatchOptions options;
  options.outputDir = dir;
  options.cacheFile = dir / "neighbors.bin";
  options.keepResults = true;
  const auto first = runBatch(d, specs, options);
  CHECK_FALSE(first.cacheLoaded);
  CHECK(fs::exists(dir / "neighbors.bin"));
  const auto second = runBatch(d, specs, options);
  CHECK(second.cacheLoaded);
  CHECK(*first.entries[0].result == *second.entries[0].result);

  // A stale cache for another dataset is ignored and rebuilt.
  auto other = testkit::makeSynthetic(testkit::randomSpec(25, 60));
  const auto third = runBatch(other, specs, options);
  CHECK_FALSE(third.cacheLoaded);
  CHECK(third.entries[0].ok);
  fs::remove_all(dir);
}
