#include "mlbalance/oversampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mlbalance/errors.hpp"
#include "mlbalance/metrics.hpp"
#include "resampling_support.hpp"

namespace mlbalance {

using detail::carriers;
using detail::interpolate;

std::size_t percentageTarget(std::size_t size, double percentage) {
  const double raw = static_cast<double>(size) * percentage / 100.0;
  return static_cast<std::size_t>(std::max(0.0, std::round(raw)));
}

// ---------------------------------------------------------------------------
// LPROS

Dataset lpros(const Dataset& data, double percentage, Rng& rng) {
  detail::requirePositivePercentage(percentage, "LPROS");
  if (data.empty()) throw AlgorithmError("LPROS: dataset has no labelsets");

  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0) return data;

  const auto bags = labelsetBags(data);
  const double meanSize = static_cast<double>(data.size()) / static_cast<double>(bags.size());
  const auto capacity = static_cast<std::size_t>(std::floor(meanSize));

  struct Pending {
    const std::vector<std::size_t>* members;
    std::size_t size;
  };
  std::vector<Pending> pending;
  for (const auto& [labels, members] : bags) {
    if (static_cast<double>(members.size()) < meanSize) pending.push_back({&members, members.size()});
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Pending& a, const Pending& b) { return a.size < b.size; });

  std::vector<Instance> clones;
  std::size_t remaining = target;
  while (remaining > 0) {
    std::erase_if(pending, [&](const Pending& p) { return p.size >= capacity; });
    if (pending.empty()) break;
    const std::size_t share = (remaining + pending.size() - 1) / pending.size();
    for (auto& bag : pending) {
      const std::size_t give = std::min({share, remaining, capacity - bag.size});
      for (std::size_t g = 0; g < give; ++g) {
        const auto& members = *bag.members;
        clones.push_back(data.instance(members[rng.uniformIndex(members.size())]));
      }
      bag.size += give;
      remaining -= give;
      if (remaining == 0) break;
    }
  }
  return editInstances(data, {}, std::move(clones));
}

// ---------------------------------------------------------------------------
// MLROS

Dataset mlros(const Dataset& data, double percentage, Rng& rng) {
  detail::requirePositivePercentage(percentage, "MLROS");
  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0 || !detail::hasActiveLabels(data)) return data;

  const auto profile = computeProfile(data);
  const double meanIR = profile.meanIR;
  auto counts = profile.counts;

  std::vector<std::vector<std::size_t>> bags(data.labelCount());
  for (auto l : profile.minorityLabels) bags[l] = carriers(data, l);

  auto irlbl = [&](std::size_t l) {
    const auto maxCount = *std::max_element(counts.begin(), counts.end());
    return static_cast<double>(maxCount) / static_cast<double>(counts[l]);
  };

  std::vector<std::size_t> active = profile.minorityLabels;
  std::vector<Instance> clones;
  std::size_t pos = 0;
  while (clones.size() < target && !active.empty()) {
    if (pos >= active.size()) pos = 0;
    const auto& bag = bags[active[pos]];
    const auto pick = bag[rng.uniformIndex(bag.size())];
    clones.push_back(data.instance(pick));
    for (auto l : data.instance(pick).labels.active()) ++counts[l];
    pos = detail::filterActive(active, pos, [&](std::size_t l) { return irlbl(l) > meanIR; });
  }
  return editInstances(data, {}, std::move(clones));
}

// ---------------------------------------------------------------------------
// MLSMOTE

namespace {

/// Most frequent value of nominal feature f among the seed and its
/// neighbors; ties resolve to the seed's value, then to the lowest index.
double nominalVote(const Dataset& data, std::size_t f, std::size_t seed,
                   std::span<const std::size_t> neighbors) {
  std::vector<std::size_t> votes(data.feature(f).domain.size(), 0);
  const auto seedValue = static_cast<std::size_t>(data.instance(seed).features[f]);
  ++votes[seedValue];
  for (auto n : neighbors) ++votes[static_cast<std::size_t>(data.instance(n).features[f])];
  const auto best = *std::max_element(votes.begin(), votes.end());
  if (votes[seedValue] == best) return static_cast<double>(seedValue);
  const auto it = std::find(votes.begin(), votes.end(), best);
  return static_cast<double>(it - votes.begin());
}

}  // namespace

Dataset mlsmote(const Dataset& data, std::size_t k, Rng& rng, SharedStructures shared) {
  detail::requireK(k, "MLSMOTE");
  if (!detail::hasActiveLabels(data)) return data;

  NeighborSearch search(data, shared);
  const auto features = data.features();
  auto counts = labelCounts(data);
  std::vector<Instance> synthetic;

  for (std::size_t label = 0; label < data.labelCount(); ++label) {
    const auto irlbl = computeIRLbl(counts);
    const double meanIR = computeMeanIR(irlbl);
    if (!irlbl[label] || *irlbl[label] <= meanIR) continue;

    const auto members = carriers(data, label);
    const Bag bag = makeBag(data.size(), members);
    std::vector<Instance> batch;
    for (auto seed : members) {
      const auto neighbors = search.knn(seed, k, bag);
      if (neighbors.empty()) continue;
      const auto reference = neighbors[rng.uniformIndex(neighbors.size())];
      const double factor = rng.uniformReal();

      Instance made;
      made.features = interpolate(features, data.instance(seed).features,
                                  data.instance(reference).features, factor);
      for (std::size_t f = 0; f < features.size(); ++f) {
        if (features[f].isNominal()) made.features[f] = nominalVote(data, f, seed, neighbors);
      }

      std::vector<std::size_t> votes(data.labelCount(), 0);
      for (auto l : data.instance(seed).labels.active()) ++votes[l];
      for (auto n : neighbors) {
        for (auto l : data.instance(n).labels.active()) ++votes[l];
      }
      const std::size_t voters = neighbors.size() + 1;
      made.labels = LabelSet(data.labelCount());
      for (std::size_t l = 0; l < votes.size(); ++l) {
        if (2 * votes[l] > voters) made.labels.set(l);
      }
      batch.push_back(std::move(made));
    }
    for (auto& inst : batch) {
      for (auto l : inst.labels.active()) ++counts[l];
      synthetic.push_back(std::move(inst));
    }
  }
  return editInstances(data, {}, std::move(synthetic));
}

// ---------------------------------------------------------------------------
// MLSOL

namespace {

enum class LocalType { safe, borderline, rare, outlier };

LocalType classify(double c) {
  if (c < 0.3) return LocalType::safe;
  if (c < 0.7) return LocalType::borderline;
  if (c < 1.0) return LocalType::rare;
  return LocalType::outlier;
}

double threshold(LocalType t) {
  constexpr double eps = 1e-5;
  switch (t) {
    case LocalType::safe: return 0.5;
    case LocalType::borderline: return 0.75;
    case LocalType::rare: return 1.0 + eps;
    case LocalType::outlier: return -eps;
  }
  return 0.5;
}

}  // namespace

Dataset mlsol(const Dataset& data, double percentage, std::size_t k, Rng& rng,
              SharedStructures shared) {
  detail::requirePositivePercentage(percentage, "MLSOL");
  detail::requireK(k, "MLSOL");
  detail::requireMoreThanK(data, k, "MLSOL");
  const std::size_t target = percentageTarget(data.size(), percentage);
  if (target == 0) return data;

  const std::size_t n = data.size();
  const std::size_t labels = data.labelCount();
  const auto minorityPresent = detail::minorityIsPresent(data);
  auto holdsMinority = [&](std::size_t i, std::size_t l) {
    return data.instance(i).labels.test(l) == minorityPresent[l];
  };

  NeighborSearch search(data, shared);
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) neighbors[i] = search.knn(i, k);

  // C(i, l): share of i's neighbors holding the opposite value, defined only
  // where i holds the minority value of l.
  std::vector<std::optional<double>> c(n * labels);
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < labels; ++l) {
      if (!holdsMinority(i, l)) continue;
      std::size_t opposite = 0;
      for (auto j : neighbors[i]) {
        if (!holdsMinority(j, l)) ++opposite;
      }
      const double value = static_cast<double>(opposite) / static_cast<double>(neighbors[i].size());
      c[i * labels + l] = value;
      if (value < 1.0) weight[i] += value;
    }
  }

  std::vector<double> cumulative(n);
  std::partial_sum(weight.begin(), weight.end(), cumulative.begin());
  const double total = cumulative.back();
  if (!(total > 0.0)) throw AlgorithmError("MLSOL: no difficult instances");

  const auto features = data.features();
  std::vector<Instance> synthetic;
  synthetic.reserve(target);
  for (std::size_t g = 0; g < target; ++g) {
    const double u = rng.uniformReal() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    auto seed = static_cast<std::size_t>(it - cumulative.begin());
    while (weight[seed] <= 0.0 && seed > 0) --seed;  // guard against rounding at the top end
    const auto& candidates = neighbors[seed];
    const auto reference = candidates[rng.uniformIndex(candidates.size())];
    const double factor = rng.uniformReal();

    const auto& s = data.instance(seed);
    const auto& r = data.instance(reference);
    Instance made;
    made.features = interpolate(features, s.features, r.features, factor);
    const double toSeed = numericDistance(features, made.features, s.features);
    const double toRef = numericDistance(features, made.features, r.features);
    const double cd = (toSeed + toRef == 0.0) ? 0.0 : toSeed / (toSeed + toRef);
    for (std::size_t f = 0; f < features.size(); ++f) {
      if (features[f].isNominal()) made.features[f] = cd <= 0.5 ? s.features[f] : r.features[f];
    }

    made.labels = LabelSet(labels);
    for (std::size_t l = 0; l < labels; ++l) {
      const bool sv = s.labels.test(l);
      const bool rv = r.labels.test(l);
      bool value = sv;
      if (sv != rv) {
        if (holdsMinority(seed, l)) {
          const auto type = classify(*c[seed * labels + l]);
          value = cd <= threshold(type) ? sv : rv;
        } else {
          const auto type = classify(*c[reference * labels + l]);
          value = (1.0 - cd) <= threshold(type) ? rv : sv;
        }
      }
      made.labels.set(l, value);
    }
    synthetic.push_back(std::move(made));
  }
  return editInstances(data, {}, std::move(synthetic));
}

// ---------------------------------------------------------------------------
// MLRkNNOS

Dataset mlrknnos(const Dataset& data, std::size_t k, Rng& rng, SharedStructures shared) {
  detail::requireK(k, "MLRkNNOS");
  if (!detail::hasActiveLabels(data)) return data;

  const auto profile = computeProfile(data);
  if (profile.minorityLabels.empty()) return data;
  const auto maxCount = *std::max_element(profile.counts.begin(), profile.counts.end());
  const auto goal = detail::ceilTolerant(static_cast<double>(maxCount) / profile.meanIR);

  NeighborSearch search(data, shared);
  const auto features = data.features();
  std::vector<Instance> synthetic;

  for (auto label : profile.minorityLabels) {
    const auto members = carriers(data, label);
    if (members.size() < 2) continue;
    const std::size_t needed = goal > profile.counts[label] ? goal - profile.counts[label] : 0;
    if (needed == 0) continue;

    const Bag bag = makeBag(data.size(), members);
    const auto reverse = search.reverseNeighbors(k, bag);
    std::vector<std::size_t> seeds;
    for (auto m : members) {
      if (!reverse[m].empty()) seeds.push_back(m);
    }
    if (seeds.empty()) continue;

    for (std::size_t made = 0; made < needed; ++made) {
      const auto seed = seeds[made % seeds.size()];
      const auto& pool = reverse[seed];
      const auto reference = pool[rng.uniformIndex(pool.size())];
      const double factor = rng.uniformReal();
      Instance inst;
      inst.features = interpolate(features, data.instance(seed).features,
                                  data.instance(reference).features, factor);
      inst.labels = data.instance(seed).labels;
      synthetic.push_back(std::move(inst));
    }
  }
  return editInstances(data, {}, std::move(synthetic));
}

}  // namespace mlbalance
