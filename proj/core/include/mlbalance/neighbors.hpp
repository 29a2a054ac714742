#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mlbalance/dataset.hpp"

namespace mlbalance {

/// Value Difference Metric statistics: for every value of every nominal
/// feature, how often it occurs and the conditional presence probability of
/// each label given that value.
class VdmTable {
 public:
  VdmTable() = default;

  /// True when the dataset has no nominal features.
  bool empty() const { return tables_.empty(); }
  std::size_t labelCount() const { return labels_; }

  std::size_t occurrences(std::size_t feature, std::size_t value) const;
  std::span<const double> probabilities(std::size_t feature, std::size_t value) const;
  double probability(std::size_t feature, std::size_t value, std::size_t label) const;

  /// Sum over labels of the squared probability difference between two
  /// values of one nominal feature.
  double valueDistance(std::size_t feature, std::size_t a, std::size_t b) const {
    const auto& t = tables_[feature];
    return t.pairTerms[a * t.counts.size() + b];
  }

  bool operator==(const VdmTable&) const = default;

 private:
  friend VdmTable buildVdmTable(const Dataset& data);

  struct FeatureTable {
    std::vector<std::size_t> counts;  // per value
    std::vector<double> probs;        // value-major, labelCount per value
    std::vector<double> pairTerms;    // domain x domain
    bool operator==(const FeatureTable&) const = default;
  };

  std::size_t labels_ = 0;
  std::vector<FeatureTable> tables_;  // indexed by feature; numeric entries stay empty
};

VdmTable buildVdmTable(const Dataset& data);

/// Heterogeneous distance: numeric differences are scaled by the frozen
/// feature range (constant features contribute nothing) and nominal values
/// are compared through the VDM table.
double distance(std::span<const FeatureSpec> features, const VdmTable& vdm,
                std::span<const double> a, std::span<const double> b);
double distance(const Dataset& data, std::size_t a, std::size_t b, const VdmTable& vdm);

/// Restricts a distance to numeric features only.
double numericDistance(std::span<const FeatureSpec> features, std::span<const double> a,
                       std::span<const double> b);

struct CacheOptions;

/// Every instance's neighbors ordered by (distance, index), bound to one
/// dataset value by fingerprint. Rows hold `depth` entries (|D|-1 by default).
class NeighborCache {
 public:
  NeighborCache() = default;

  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t size() const { return size_; }
  std::size_t depth() const { return depth_; }
  bool complete() const { return size_ == 0 || depth_ + 1 == size_; }

  std::span<const std::uint32_t> ranking(std::size_t i) const {
    return {indices_.data() + i * depth_, depth_};
  }
  std::span<const double> distances(std::size_t i) const {
    return {distances_.data() + i * depth_, depth_};
  }

  /// Throws CacheError unless the cache was built for exactly this dataset.
  void verify(const Dataset& data) const;

  /// Binary sidecar: "MLBNCACH", fingerprint, instance count, depth (u64
  /// each), then row-major u32 indices and row-major f64 distances, all
  /// little-endian.
  void save(const std::filesystem::path& path) const;
  static NeighborCache load(const std::filesystem::path& path);

  bool operator==(const NeighborCache&) const = default;

 private:
  friend NeighborCache buildNeighborCache(const Dataset&, const VdmTable&, const CacheOptions&);

  std::uint64_t fingerprint_ = 0;
  std::size_t size_ = 0;
  std::size_t depth_ = 0;
  std::vector<std::uint32_t> indices_;
  std::vector<double> distances_;
};

struct CacheOptions {
  std::size_t depth = 0;  // 0 = full ranking
  unsigned threads = 1;
  /// Called with the completed fraction, from the calling thread.
  std::function<void(double)> progress;
};

/// Rows are computed independently, so the result does not depend on the
/// number of threads. Throws CacheError("insufficient instances") when the
/// dataset has fewer than two instances.
NeighborCache buildNeighborCache(const Dataset& data, const VdmTable& vdm,
                                 const CacheOptions& options = {});

/// Membership mask over instance indices.
using Bag = std::vector<bool>;
Bag makeBag(std::size_t size, std::span<const std::size_t> members);

/// First k entries of i's ranking, skipping non-members when a bag is given.
/// May return fewer than k when the (possibly truncated) ranking runs out.
std::vector<std::size_t> knn(const NeighborCache& cache, std::size_t i, std::size_t k,
                             const Bag* bag = nullptr);

/// For each instance x, the instances q that list x among their k nearest
/// neighbors (ascending). With a bag, both sides are restricted to members.
std::vector<std::vector<std::size_t>> reverseNeighbors(const NeighborCache& cache, std::size_t k,
                                                       const Bag* bag = nullptr);

/// Precomputed structures an algorithm may reuse. Either may be null.
struct SharedStructures {
  const VdmTable* vdm = nullptr;
  const NeighborCache* neighbors = nullptr;
};

/// Neighbor queries over one dataset, answered from a cache when one is
/// supplied and by direct computation otherwise. Both routes give identical
/// results; truncated cache rows fall back to direct computation.
class NeighborSearch {
 public:
  explicit NeighborSearch(const Dataset& data, SharedStructures shared = {});
  NeighborSearch(const NeighborSearch&) = delete;
  NeighborSearch& operator=(const NeighborSearch&) = delete;

  bool cached() const { return cache_ != nullptr; }
  const VdmTable& vdm() const { return *vdm_; }
  const Dataset& data() const { return *data_; }

  double distance(std::size_t a, std::size_t b) const;

  std::vector<std::size_t> knn(std::size_t i, std::size_t k) const;
  std::vector<std::size_t> knn(std::size_t i, std::size_t k, const Bag& bag) const;

  std::vector<std::vector<std::size_t>> reverseNeighbors(std::size_t k) const;
  std::vector<std::vector<std::size_t>> reverseNeighbors(std::size_t k, const Bag& bag) const;

 private:
  std::vector<std::size_t> directKnn(std::size_t i, std::size_t k, const Bag* bag) const;
  std::vector<std::size_t> query(std::size_t i, std::size_t k, const Bag* bag) const;

  const Dataset* data_;
  std::shared_ptr<const VdmTable> ownedVdm_;
  const VdmTable* vdm_;
  const NeighborCache* cache_;
};

}  // namespace mlbalance
