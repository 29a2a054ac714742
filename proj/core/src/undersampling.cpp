#include "mlbalance/undersampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlbalance/errors.hpp"
#include "mlbalance/metrics.hpp"
#include "mlbalance/oversampling.hpp"
#include "resampling_support.hpp"

namespace mlbalance {

double adjustedHamming(const LabelSet& a, const LabelSet& b) {
  const std::size_t active = a.count() + b.count();
  if (active == 0) return 0.0;
  return static_cast<double>((a ^ b).count()) / static_cast<double>(active);
}

// ---------------------------------------------------------------------------
// LPRUS

Dataset lprus(const Dataset& data, double percentage, Rng& rng) {
  detail::requireFractionPercentage(percentage, "LPRUS");
  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0 || data.empty()) return data;

  const auto bags = labelsetBags(data);
  const double meanSize = static_cast<double>(data.size()) / static_cast<double>(bags.size());
  const auto floorSize = static_cast<std::size_t>(std::ceil(meanSize));

  std::vector<std::vector<std::size_t>> pending;
  for (const auto& [labels, members] : bags) {
    if (static_cast<double>(members.size()) > meanSize) pending.push_back(members);
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<std::size_t> removals;
  std::size_t remaining = target;
  while (remaining > 0) {
    std::erase_if(pending, [&](const auto& bag) { return bag.size() <= floorSize; });
    if (pending.empty()) break;
    const std::size_t share = (remaining + pending.size() - 1) / pending.size();
    for (auto& bag : pending) {
      const std::size_t take = std::min({share, remaining, bag.size() - floorSize});
      for (std::size_t t = 0; t < take; ++t) {
        const auto pick = rng.uniformIndex(bag.size());
        removals.push_back(bag[pick]);
        bag[pick] = bag.back();
        bag.pop_back();
      }
      remaining -= take;
      if (remaining == 0) break;
    }
  }
  return editInstances(data, removals);
}

// ---------------------------------------------------------------------------
// MLRUS

Dataset mlrus(const Dataset& data, double percentage, Rng& rng) {
  detail::requireFractionPercentage(percentage, "MLRUS");
  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0 || !detail::hasActiveLabels(data)) return data;

  const auto profile = computeProfile(data);
  const double meanIR = profile.meanIR;
  const LabelSet minority = profile.minorityMask();
  auto counts = profile.counts;

  // Eligible carriers per majority label; deleted entries are dropped lazily.
  std::vector<std::vector<std::size_t>> pools(data.labelCount());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& labels = data.instance(i).labels;
    if (labels.none() || (labels & minority).any()) continue;
    for (auto l : labels.active()) pools[l].push_back(i);
  }
  std::vector<bool> deleted(data.size(), false);

  auto alive = [&](std::size_t l) {
    auto& pool = pools[l];
    std::erase_if(pool, [&](std::size_t i) { return deleted[i]; });
    return !pool.empty();
  };
  auto keep = [&](std::size_t l) {
    if (counts[l] == 0 || !alive(l)) return false;
    const auto maxCount = *std::max_element(counts.begin(), counts.end());
    return static_cast<double>(maxCount) / static_cast<double>(counts[l]) < meanIR;
  };

  std::vector<std::size_t> active = profile.majorityLabels;
  detail::filterActive(active, 0, keep);
  std::vector<std::size_t> removals;
  std::size_t pos = 0;
  while (removals.size() < target && !active.empty()) {
    if (pos >= active.size()) pos = 0;
    auto& pool = pools[active[pos]];
    const auto slot = rng.uniformIndex(pool.size());
    const auto victim = pool[slot];
    deleted[victim] = true;
    removals.push_back(victim);
    for (auto l : data.instance(victim).labels.active()) --counts[l];
    pos = detail::filterActive(active, pos, keep);
  }
  return editInstances(data, removals);
}

// ---------------------------------------------------------------------------
// MLeNN

Dataset mlenn(const Dataset& data, double threshold, std::size_t k, SharedStructures shared) {
  detail::requireThreshold(threshold, "MLeNN");
  detail::requireK(k, "MLeNN");
  detail::requireMoreThanK(data, k, "MLeNN");
  if (!detail::hasActiveLabels(data)) return data;

  const LabelSet minority = computeProfile(data).minorityMask();
  NeighborSearch search(data, shared);
  const std::size_t votesNeeded = (k + 1) / 2;

  std::vector<std::size_t> removals;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& labels = data.instance(i).labels;
    if ((labels & minority).any()) continue;
    std::size_t differing = 0;
    for (auto j : search.knn(i, k)) {
      if (adjustedHamming(labels, data.instance(j).labels) > threshold) ++differing;
    }
    if (differing >= votesNeeded) removals.push_back(i);
  }
  return editInstances(data, removals);
}

// ---------------------------------------------------------------------------
// MLTL

Dataset mltl(const Dataset& data, double threshold, SharedStructures shared) {
  detail::requireThreshold(threshold, "MLTL");
  if (data.size() < 2) throw AlgorithmError("MLTL: needs at least 2 instances");
  if (!detail::hasActiveLabels(data)) return data;

  const LabelSet minority = computeProfile(data).minorityMask();
  NeighborSearch search(data, shared);
  std::vector<std::size_t> nearest(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) nearest[i] = search.knn(i, 1).front();

  std::vector<std::size_t> removals;
  for (std::size_t a = 0; a < data.size(); ++a) {
    const auto b = nearest[a];
    if (a > b || nearest[b] != a) continue;
    const auto& la = data.instance(a).labels;
    const auto& lb = data.instance(b).labels;
    if (adjustedHamming(la, lb) < threshold) continue;
    if ((la & minority).none()) removals.push_back(a);
    if ((lb & minority).none()) removals.push_back(b);
  }
  return editInstances(data, removals);
}

// ---------------------------------------------------------------------------
// MLUL

Dataset mlul(const Dataset& data, double percentage, std::size_t k, Rng& rng,
             SharedStructures shared) {
  (void)rng;  // ranking is deterministic; the generator is accepted for interface symmetry
  detail::requireFractionPercentage(percentage, "MLUL");
  detail::requireK(k, "MLUL");
  detail::requireMoreThanK(data, k, "MLUL");
  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0) return data;

  const std::size_t n = data.size();
  const auto minorityPresent = detail::minorityIsPresent(data);
  NeighborSearch search(data, shared);

  const double unit = 1.0 / static_cast<double>(k);
  std::vector<double> harm(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    const auto& lq = data.instance(q).labels;
    for (auto i : search.knn(q, k)) {
      const auto& li = data.instance(i).labels;
      for (std::size_t l = 0; l < data.labelCount(); ++l) {
        if (lq.test(l) == minorityPresent[l] && li.test(l) != lq.test(l)) harm[i] += unit;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (harm[a] != harm[b]) return harm[a] > harm[b];
    return a > b;
  });

  auto counts = labelCounts(data);
  std::vector<std::size_t> removals;
  for (auto i : order) {
    if (removals.size() == target) break;
    const auto active = data.instance(i).labels.active();
    if (std::any_of(active.begin(), active.end(), [&](std::size_t l) { return counts[l] <= 1; })) {
      continue;
    }
    for (auto l : active) --counts[l];
    removals.push_back(i);
  }
  return editInstances(data, removals);
}

}  // namespace mlbalance
