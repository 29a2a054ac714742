#include "mlbalance/batch.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <thread>

#include "mlbalance/arff.hpp"
#include "mlbalance/errors.hpp"
#include "mlbalance/neighbors.hpp"
#include "mlbalance/random.hpp"

namespace mlbalance {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Text progress bar with a linear ETA.
class ProgressBar {
 public:
  explicit ProgressBar(std::ostream& out) : out_(out), start_(Clock::now()) {}

  void update(double fraction) {
    fraction = std::clamp(fraction, 0.0, 1.0);
    const int percent = static_cast<int>(fraction * 100.0);
    if (percent == last_) return;
    last_ = percent;
    constexpr int width = 40;
    const int filled = static_cast<int>(fraction * width);
    out_ << "\r|" << std::string(static_cast<std::size_t>(filled), '+')
         << std::string(static_cast<std::size_t>(width - filled), ' ') << "| " << std::setw(3)
         << percent << "%";
    const double elapsed = secondsSince(start_);
    if (fraction > 0.0 && fraction < 1.0) {
      out_ << "  ETA " << std::fixed << std::setprecision(1) << elapsed * (1.0 - fraction) / fraction
           << "s" << std::defaultfloat;
    } else {
      out_ << "             ";
    }
    if (percent == 100) out_ << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  Clock::time_point start_;
  int last_ = -1;
};

std::string describeParams(const AlgorithmParams& p) {
  std::vector<std::string> parts;
  if (p.percentage) parts.push_back("P = " + formatNumber(*p.percentage));
  if (p.threshold) parts.push_back("threshold = " + formatNumber(*p.threshold));
  if (p.k) parts.push_back("k = " + std::to_string(*p.k));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

unsigned availableCores() { return std::max(1U, std::thread::hardware_concurrency()); }

unsigned configureParallel(unsigned requested, unsigned available) {
  available = std::max(1U, available);
  if (requested == 0) return available;
  return std::min(requested, available);
}

bool ResampleReport::anyFailed() const {
  return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return !e.ok; });
}

ResampleReport runBatch(const Dataset& data, std::span<const AlgorithmSpec> specs,
                        const BatchOptions& options) {
  ResampleReport report;
  report.threads = std::max(1U, options.threads);
  std::ostream* log = options.log;
  const std::string base = options.baseName.empty() ? data.name() : options.baseName;

  const bool wantNeighbors =
      std::any_of(specs.begin(), specs.end(), [](const auto& s) { return needsNeighbors(s.algorithm); });

  std::optional<VdmTable> vdm;
  std::optional<NeighborCache> cache;
  std::string cacheError;
  if (wantNeighbors) {
    if (log) *log << "# Building VDM table for " << base << '\n';
    auto start = Clock::now();
    vdm = buildVdmTable(data);
    report.vdmSeconds = secondsSince(start);
    if (log) *log << "# Time taken (in seconds): " << report.vdmSeconds << '\n';

    start = Clock::now();
    if (options.cacheFile && std::filesystem::exists(*options.cacheFile)) {
      try {
        auto loaded = NeighborCache::load(*options.cacheFile);
        loaded.verify(data);
        cache = std::move(loaded);
        report.cacheLoaded = true;
        if (log) *log << "# Loaded neighbor cache from " << options.cacheFile->string() << '\n';
      } catch (const CacheError& e) {
        if (log) *log << "# Ignoring cache file (" << e.what() << "); rebuilding\n";
      }
    }
    if (!cache) {
      if (log) {
        *log << "# Building neighbor cache for " << base << " on " << report.threads
             << (report.threads == 1 ? " thread" : " threads") << '\n';
      }
      CacheOptions cacheOptions;
      cacheOptions.depth = options.cacheDepth;
      cacheOptions.threads = report.threads;
      std::optional<ProgressBar> bar;
      if (log && options.progressBar) {
        bar.emplace(*log);
        cacheOptions.progress = [&bar](double f) { bar->update(f); };
      }
      try {
        cache = buildNeighborCache(data, *vdm, cacheOptions);
        if (options.cacheFile) cache->save(*options.cacheFile);
      } catch (const Error& e) {
        cacheError = std::string("neighbor cache: ") + e.what();
        if (log) *log << "# " << cacheError << '\n';
      }
    }
    report.neighborsBuilt = cache.has_value();
    report.cacheSeconds = secondsSince(start);
    if (log) *log << "# Time taken (in seconds): " << report.cacheSeconds << '\n';
  }

  const SharedStructures shared{vdm ? &*vdm : nullptr, cache ? &*cache : nullptr};
  for (const auto& spec : specs) {
    AlgorithmOutcome outcome;
    outcome.algorithm = std::string(algorithmName(spec.algorithm));
    outcome.params = spec.params;
    outcome.instancesBefore = data.size();
    if (log) {
      *log << "# Running " << outcome.algorithm << " on " << base;
      if (auto p = describeParams(spec.params); !p.empty()) *log << " with " << p;
      *log << '\n';
      if (needsNeighbors(spec.algorithm) && cache) *log << "#   reusing precomputed neighbors\n";
    }
    if (needsNeighbors(spec.algorithm) && !cache) {
      outcome.ok = false;
      outcome.error = cacheError;
      if (log) *log << "#   failed: " << cacheError << '\n';
      report.entries.push_back(std::move(outcome));
      continue;
    }
    try {
      const auto start = Clock::now();
      Dataset result = applyAlgorithm(spec, data, deriveSeed(options.seed, outcome.algorithm), shared,
                                      &outcome.warnings);
      outcome.seconds = secondsSince(start);
      outcome.instancesAfter = result.size();
      if (options.writeOutputs) {
        auto file = outputName(base, outcome.algorithm, spec.params);
        const std::string stem = file.substr(0, file.size() - 5);
        outcome.output = writeDataset(result.withName(stem), options.outputDir, stem);
      }
      if (options.keepResults) outcome.result = std::move(result);
      if (log) {
        for (const auto& w : outcome.warnings) *log << "#   warning: " << w << '\n';
        *log << "# Time taken (in seconds): " << outcome.seconds << '\n';
      }
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.error = e.what();
      if (log) *log << "#   failed: " << e.what() << '\n';
    }
    report.entries.push_back(std::move(outcome));
  }
  if (log && options.writeOutputs) {
    *log << "# Done. Output datasets written to " << options.outputDir.string() << '\n';
  }
  return report;
}

void printReport(std::ostream& out, const ResampleReport& report) {
  std::size_t width = 9;
  for (const auto& e : report.entries) width = std::max(width, e.algorithm.size());
  out << std::left << std::setw(4) << "#" << std::setw(static_cast<int>(width) + 2) << "algorithm"
      << std::setw(12) << "seconds" << "instances\n";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    out << std::left << std::setw(4) << (i + 1) << std::setw(static_cast<int>(width) + 2) << e.algorithm;
    if (e.ok) {
      out << std::setw(12) << e.seconds << e.instancesBefore << " -> " << e.instancesAfter << '\n';
    } else {
      out << std::setw(12) << "failed" << e.error << '\n';
    }
  }
  out << std::right;
}

}  // namespace mlbalance
