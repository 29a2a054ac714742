#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlbalance/algorithms.hpp"
#include "mlbalance/dataset.hpp"

namespace mlbalance {

unsigned availableCores();

/// Worker count for cache construction: 0 means every available core;
/// requests above the available count are clamped.
unsigned configureParallel(unsigned requested, unsigned available = availableCores());

struct AlgorithmOutcome {
  std::string algorithm;
  AlgorithmParams params;
  std::filesystem::path output;
  std::size_t instancesBefore = 0;
  std::size_t instancesAfter = 0;
  double seconds = 0.0;  // algorithm call only, excluding I/O
  bool ok = true;
  std::string error;
  std::vector<std::string> warnings;
  std::optional<Dataset> result;  // kept when BatchOptions::keepResults
};

struct ResampleReport {
  std::vector<AlgorithmOutcome> entries;
  double vdmSeconds = 0.0;
  double cacheSeconds = 0.0;
  bool neighborsBuilt = false;
  bool cacheLoaded = false;
  unsigned threads = 1;

  bool anyFailed() const;
};

struct BatchOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path outputDir = ".";
  std::string baseName;  // defaults to the dataset name
  std::optional<std::filesystem::path> cacheFile;
  std::size_t cacheDepth = 0;
  bool writeOutputs = true;
  bool keepResults = false;
  std::ostream* log = nullptr;
  bool progressBar = false;
};

/// Runs every spec against the same dataset. The VDM table and neighbor
/// cache are built (or loaded from `cacheFile`) once, and only when some
/// algorithm needs them. Each algorithm is seeded with
/// deriveSeed(seed, name). Failures are recorded per entry; the remaining
/// algorithms still run.
ResampleReport runBatch(const Dataset& data, std::span<const AlgorithmSpec> specs,
                        const BatchOptions& options);

/// Final per-algorithm timing table.
void printReport(std::ostream& out, const ResampleReport& report);

}  // namespace mlbalance
