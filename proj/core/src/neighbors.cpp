#include "mlbalance/neighbors.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>
#include <utility>

#include "mlbalance/errors.hpp"

namespace mlbalance {

// ---------------------------------------------------------------------------
// VDM

std::size_t VdmTable::occurrences(std::size_t feature, std::size_t value) const {
  return tables_.at(feature).counts.at(value);
}

std::span<const double> VdmTable::probabilities(std::size_t feature, std::size_t value) const {
  const auto& t = tables_.at(feature);
  if (value >= t.counts.size()) throw DomainError("VDM value index out of range");
  return {t.probs.data() + value * labels_, labels_};
}

double VdmTable::probability(std::size_t feature, std::size_t value, std::size_t label) const {
  return probabilities(feature, value)[label];
}

VdmTable buildVdmTable(const Dataset& data) {
  VdmTable table;
  const bool anyNominal = std::any_of(data.features().begin(), data.features().end(),
                                      [](const FeatureSpec& f) { return f.isNominal(); });
  if (!anyNominal) return table;

  const std::size_t labels = data.labelCount();
  table.labels_ = labels;
  table.tables_.resize(data.featureCount());
  for (std::size_t f = 0; f < data.featureCount(); ++f) {
    const auto& spec = data.feature(f);
    if (!spec.isNominal()) continue;
    auto& t = table.tables_[f];
    const std::size_t values = spec.domain.size();
    t.counts.assign(values, 0);
    std::vector<std::size_t> withLabel(values * labels, 0);
    for (const auto& inst : data.instances()) {
      const auto v = static_cast<std::size_t>(inst.features[f]);
      ++t.counts[v];
      for (auto l : inst.labels.active()) ++withLabel[v * labels + l];
    }
    t.probs.assign(values * labels, 0.0);
    for (std::size_t v = 0; v < values; ++v) {
      if (t.counts[v] == 0) continue;
      for (std::size_t l = 0; l < labels; ++l) {
        t.probs[v * labels + l] =
            static_cast<double>(withLabel[v * labels + l]) / static_cast<double>(t.counts[v]);
      }
    }
    t.pairTerms.assign(values * values, 0.0);
    for (std::size_t a = 0; a < values; ++a) {
      for (std::size_t b = 0; b < values; ++b) {
        double term = 0.0;
        for (std::size_t l = 0; l < labels; ++l) {
          const double d = t.probs[a * labels + l] - t.probs[b * labels + l];
          term += d * d;
        }
        t.pairTerms[a * values + b] = term;
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Distance

double distance(std::span<const FeatureSpec> features, const VdmTable& vdm,
                std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& spec = features[f];
    if (spec.isNominal()) {
      sum += vdm.valueDistance(f, static_cast<std::size_t>(a[f]), static_cast<std::size_t>(b[f]));
    } else {
      const double range = spec.max - spec.min;
      if (range > 0.0) {
        const double t = (a[f] - b[f]) / range;
        sum += t * t;
      }
    }
  }
  return std::sqrt(sum);
}

double distance(const Dataset& data, std::size_t a, std::size_t b, const VdmTable& vdm) {
  return distance(data.features(), vdm, data.instance(a).features, data.instance(b).features);
}

double numericDistance(std::span<const FeatureSpec> features, std::span<const double> a,
                       std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& spec = features[f];
    if (spec.isNominal()) continue;
    const double range = spec.max - spec.min;
    if (range > 0.0) {
      const double t = (a[f] - b[f]) / range;
      sum += t * t;
    }
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Cache construction

namespace {

using Entry = std::pair<double, std::uint32_t>;

void rankRow(const Dataset& data, const VdmTable& vdm, std::size_t i, std::size_t depth,
             std::vector<Entry>& scratch, std::uint32_t* outIndices, double* outDistances) {
  scratch.clear();
  const auto features = data.features();
  const auto& self = data.instance(i).features;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (j == i) continue;
    scratch.emplace_back(distance(features, vdm, self, data.instance(j).features),
                         static_cast<std::uint32_t>(j));
  }
  if (depth < scratch.size()) {
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(depth),
                      scratch.end());
  } else {
    std::sort(scratch.begin(), scratch.end());
  }
  for (std::size_t r = 0; r < depth; ++r) {
    outDistances[r] = scratch[r].first;
    outIndices[r] = scratch[r].second;
  }
}

}  // namespace

NeighborCache buildNeighborCache(const Dataset& data, const VdmTable& vdm,
                                 const CacheOptions& options) {
  const std::size_t n = data.size();
  if (n < 2) throw CacheError("insufficient instances");
  if (n > std::size_t{UINT32_MAX}) throw CacheError("too many instances for a neighbor cache");
  const std::size_t depth = options.depth == 0 ? n - 1 : options.depth;
  if (depth > n - 1) {
    throw CacheError("cache depth " + std::to_string(depth) + " exceeds " + std::to_string(n - 1));
  }

  NeighborCache cache;
  cache.fingerprint_ = fingerprint(data);
  cache.size_ = n;
  cache.depth_ = depth;
  cache.indices_.resize(n * depth);
  cache.distances_.resize(n * depth);

  const unsigned threads = std::max(1U, options.threads);
  auto report = [&](std::size_t done) {
    if (options.progress) options.progress(static_cast<double>(done) / static_cast<double>(n));
  };

  if (threads == 1) {
    std::vector<Entry> scratch;
    scratch.reserve(n);
    const std::size_t step = std::max<std::size_t>(1, n / 100);
    for (std::size_t i = 0; i < n; ++i) {
      rankRow(data, vdm, i, depth, scratch, cache.indices_.data() + i * depth,
              cache.distances_.data() + i * depth);
      if ((i + 1) % step == 0 || i + 1 == n) report(i + 1);
    }
    return cache;
  }

  // Workers claim chunks of rows; each row is written by exactly one worker.
  constexpr std::size_t kChunk = 8;
  std::atomic<std::size_t> nextRow{0};
  std::atomic<std::size_t> doneRows{0};
  std::mutex mutex;
  std::condition_variable finished;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        std::vector<Entry> scratch;
        scratch.reserve(n);
        for (;;) {
          const std::size_t begin = nextRow.fetch_add(kChunk);
          if (begin >= n) break;
          const std::size_t end = std::min(n, begin + kChunk);
          for (std::size_t i = begin; i < end; ++i) {
            rankRow(data, vdm, i, depth, scratch, cache.indices_.data() + i * depth,
                    cache.distances_.data() + i * depth);
          }
          if (doneRows.fetch_add(end - begin) + (end - begin) == n) {
            std::lock_guard lock(mutex);
            finished.notify_all();
          }
        }
      });
    }
    std::unique_lock lock(mutex);
    while (doneRows.load() < n) {
      finished.wait_for(lock, std::chrono::milliseconds(100));
      report(doneRows.load());
    }
  }
  return cache;
}

void NeighborCache::verify(const Dataset& data) const {
  if (size_ != data.size() || fingerprint_ != mlbalance::fingerprint(data)) {
    throw CacheError("neighbor cache does not match dataset (fingerprint mismatch)");
  }
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr char kMagic[8] = {'M', 'L', 'B', 'N', 'C', 'A', 'C', 'H'};

void putU64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t getU64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw CacheError("truncated neighbor cache file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace

void NeighborCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof kMagic);
  putU64(out, fingerprint_);
  putU64(out, size_);
  putU64(out, depth_);
  std::vector<char> buf;
  buf.reserve(indices_.size() * 4);
  for (auto idx : indices_) {
    for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((idx >> (8 * b)) & 0xff));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.clear();
  buf.reserve(distances_.size() * 8);
  for (double d : distances_) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

NeighborCache NeighborCache::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kMagic)) throw CacheError("not a neighbor cache file");
  NeighborCache cache;
  cache.fingerprint_ = getU64(in);
  cache.size_ = getU64(in);
  cache.depth_ = getU64(in);
  if (cache.size_ < 2 || cache.depth_ == 0 || cache.depth_ >= cache.size_) {
    throw CacheError("corrupt neighbor cache header");
  }
  const std::size_t cells = cache.size_ * cache.depth_;
  std::vector<unsigned char> buf(cells * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw CacheError("truncated neighbor cache file");
  cache.indices_.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | buf[c * 4 + static_cast<std::size_t>(b)];
    if (v >= cache.size_) throw CacheError("corrupt neighbor cache index");
    cache.indices_[c] = v;
  }
  buf.resize(cells * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw CacheError("truncated neighbor cache file");
  cache.distances_.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | buf[c * 8 + static_cast<std::size_t>(b)];
    cache.distances_[c] = std::bit_cast<double>(v);
  }
  return cache;
}

// ---------------------------------------------------------------------------
// Queries

Bag makeBag(std::size_t size, std::span<const std::size_t> members) {
  Bag bag(size, false);
  for (auto m : members) bag.at(m) = true;
  return bag;
}

std::vector<std::size_t> knn(const NeighborCache& cache, std::size_t i, std::size_t k,
                             const Bag* bag) {
  std::vector<std::size_t> out;
  if (i >= cache.size()) throw CacheError("instance index out of range for neighbor cache");
  for (auto j : cache.ranking(i)) {
    if (out.size() == k) break;
    if (bag && !(*bag)[j]) continue;
    out.push_back(j);
  }
  return out;
}

std::vector<std::vector<std::size_t>> reverseNeighbors(const NeighborCache& cache, std::size_t k,
                                                       const Bag* bag) {
  std::vector<std::vector<std::size_t>> out(cache.size());
  for (std::size_t q = 0; q < cache.size(); ++q) {
    if (bag && !(*bag)[q]) continue;
    for (auto x : knn(cache, q, k, bag)) out[x].push_back(q);
  }
  return out;
}

NeighborSearch::NeighborSearch(const Dataset& data, SharedStructures shared)
    : data_(&data), vdm_(shared.vdm), cache_(shared.neighbors) {
  if (cache_) cache_->verify(data);
  if (!vdm_) {
    ownedVdm_ = std::make_shared<const VdmTable>(buildVdmTable(data));
    vdm_ = ownedVdm_.get();
  }
}

double NeighborSearch::distance(std::size_t a, std::size_t b) const {
  return mlbalance::distance(*data_, a, b, *vdm_);
}

std::vector<std::size_t> NeighborSearch::directKnn(std::size_t i, std::size_t k,
                                                   const Bag* bag) const {
  std::vector<Entry> entries;
  const auto features = data_->features();
  const auto& self = data_->instance(i).features;
  for (std::size_t j = 0; j < data_->size(); ++j) {
    if (j == i || (bag && !(*bag)[j])) continue;
    entries.emplace_back(mlbalance::distance(features, *vdm_, self, data_->instance(j).features),
                         static_cast<std::uint32_t>(j));
  }
  const std::size_t take = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(take),
                    entries.end());
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) out.push_back(entries[r].second);
  return out;
}

std::vector<std::size_t> NeighborSearch::query(std::size_t i, std::size_t k, const Bag* bag) const {
  if (i >= data_->size()) throw StructuralError("instance index out of range");
  if (!cache_) return directKnn(i, k, bag);
  auto out = mlbalance::knn(*cache_, i, k, bag);
  if (out.size() < k && !cache_->complete()) return directKnn(i, k, bag);
  return out;
}

std::vector<std::size_t> NeighborSearch::knn(std::size_t i, std::size_t k) const {
  return query(i, k, nullptr);
}

std::vector<std::size_t> NeighborSearch::knn(std::size_t i, std::size_t k, const Bag& bag) const {
  return query(i, k, &bag);
}

std::vector<std::vector<std::size_t>> NeighborSearch::reverseNeighbors(std::size_t k) const {
  std::vector<std::vector<std::size_t>> out(data_->size());
  for (std::size_t q = 0; q < data_->size(); ++q) {
    for (auto x : query(q, k, nullptr)) out[x].push_back(q);
  }
  return out;
}

std::vector<std::vector<std::size_t>> NeighborSearch::reverseNeighbors(std::size_t k,
                                                                       const Bag& bag) const {
  std::vector<std::vector<std::size_t>> out(data_->size());
  for (std::size_t q = 0; q < data_->size(); ++q) {
    if (!bag[q]) continue;
    for (auto x : query(q, k, &bag)) out[x].push_back(q);
  }
  return out;
}

}  // namespace mlbalance
