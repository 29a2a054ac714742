#pragma once

// Helpers shared by the resampling algorithms. Not installed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlbalance/dataset.hpp"
#include "mlbalance/errors.hpp"
#include "mlbalance/random.hpp"

namespace mlbalance::detail {

inline void requirePositivePercentage(double percentage, const char* algorithm) {
  if (!(percentage > 0.0) || !std::isfinite(percentage)) {
    throw AlgorithmError(std::string(algorithm) + ": percentage must be positive");
  }
}

inline void requireFractionPercentage(double percentage, const char* algorithm) {
  if (!(percentage > 0.0 && percentage < 100.0)) {
    throw AlgorithmError(std::string(algorithm) + ": percentage must lie in (0, 100)");
  }
}

inline void requireK(std::size_t k, const char* algorithm) {
  if (k < 1) throw AlgorithmError(std::string(algorithm) + ": k must be at least 1");
}

inline void requireMoreThanK(const Dataset& data, std::size_t k, const char* algorithm) {
  if (data.size() <= k) {
    throw AlgorithmError(std::string(algorithm) + ": needs more than k=" + std::to_string(k) +
                         " instances, got " + std::to_string(data.size()));
  }
}

inline void requireThreshold(double threshold, const char* algorithm) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw AlgorithmError(std::string(algorithm) + ": threshold must lie in (0, 1]");
  }
}

inline bool hasActiveLabels(const Dataset& data) {
  return std::any_of(data.instances().begin(), data.instances().end(),
                     [](const Instance& i) { return i.labels.any(); });
}

/// ceil() that ignores floating-point noise just above an integer.
inline std::size_t ceilTolerant(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(std::max(0.0, r));
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x)));
}

/// Instance indices carrying `label`, ascending.
inline std::vector<std::size_t> carriers(const Dataset& data, std::size_t label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.instance(i).labels.test(label)) out.push_back(i);
  }
  return out;
}

/// Numeric features move along the seed->reference segment by one shared
/// factor; nominal features are left as the seed's values for the caller to
/// overwrite. Results are clamped to the segment.
inline std::vector<double> interpolate(std::span<const FeatureSpec> features,
                                       std::span<const double> seed,
                                       std::span<const double> reference, double factor) {
  std::vector<double> out(seed.begin(), seed.end());
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (features[f].isNominal()) continue;
    const double lo = std::min(seed[f], reference[f]);
    const double hi = std::max(seed[f], reference[f]);
    out[f] = std::clamp(seed[f] + factor * (reference[f] - seed[f]), lo, hi);
  }
  return out;
}

/// For each label, whether "present" is the rarer value (ties count as
/// present being the minority).
inline std::vector<bool> minorityIsPresent(const Dataset& data) {
  const auto counts = labelCounts(data);
  std::vector<bool> out(counts.size());
  for (std::size_t l = 0; l < counts.size(); ++l) out[l] = 2 * counts[l] <= data.size();
  return out;
}

/// Removes entries of `active` rejected by `keep`, and returns the position
/// in the filtered list that follows the entry formerly at `pos`.
template <typename Keep>
std::size_t filterActive(std::vector<std::size_t>& active, std::size_t pos, Keep keep) {
  std::vector<std::size_t> kept;
  std::size_t next = 0;
  for (std::size_t q = 0; q < active.size(); ++q) {
    if (!keep(active[q])) continue;
    if (q <= pos) ++next;
    kept.push_back(active[q]);
  }
  active = std::move(kept);
  return next;
}

}  // namespace mlbalance::detail
