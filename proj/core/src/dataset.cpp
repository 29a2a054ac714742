#include "mlbalance/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <string>
#include <unordered_set>

#include "mlbalance/errors.hpp"

namespace mlbalance {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t wordCount(std::size_t width) { return (width + kWordBits - 1) / kWordBits; }

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

FeatureSpec FeatureSpec::numeric(std::string name) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::numeric;
  return spec;
}

FeatureSpec FeatureSpec::nominal(std::string name, std::vector<std::string> values) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::nominal;
  spec.domain = std::move(values);
  return spec;
}

// ---------------------------------------------------------------------------
// LabelSet

LabelSet::LabelSet(std::size_t width) : width_(width), words_(wordCount(width), 0) {}

LabelSet::LabelSet(std::size_t width, std::initializer_list<std::size_t> active)
    : LabelSet(width) {
  for (auto l : active) set(l);
}

bool LabelSet::test(std::size_t label) const {
  if (label >= width_) throw StructuralError("label index " + std::to_string(label) + " out of range");
  return (words_[label / kWordBits] >> (label % kWordBits)) & 1U;
}

void LabelSet::set(std::size_t label, bool value) {
  if (label >= width_) throw StructuralError("label index " + std::to_string(label) + " out of range");
  const std::uint64_t mask = std::uint64_t{1} << (label % kWordBits);
  if (value)
    words_[label / kWordBits] |= mask;
  else
    words_[label / kWordBits] &= ~mask;
}

std::size_t LabelSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> LabelSet::active() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

void LabelSet::checkWidth(const LabelSet& other) const {
  if (width_ != other.width_) throw StructuralError("label set width mismatch");
}

LabelSet LabelSet::operator&(const LabelSet& other) const {
  checkWidth(other);
  LabelSet out(width_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = words_[w] & other.words_[w];
  return out;
}

LabelSet LabelSet::operator|(const LabelSet& other) const {
  checkWidth(other);
  LabelSet out(width_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = words_[w] | other.words_[w];
  return out;
}

LabelSet LabelSet::operator^(const LabelSet& other) const {
  checkWidth(other);
  LabelSet out(width_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = words_[w] ^ other.words_[w];
  return out;
}

std::strong_ordering LabelSet::operator<=>(const LabelSet& other) const {
  if (auto c = width_ <=> other.width_; c != 0) return c;
  // Compare from the highest word down so the order matches numeric order of
  // the bit pattern.
  for (std::size_t w = words_.size(); w-- > 0;) {
    if (auto c = words_[w] <=> other.words_[w]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Dataset

void Dataset::validateRow(const Instance& row, std::size_t index) const {
  if (row.features.size() != features_.size()) {
    throw StructuralError("row " + std::to_string(index) + ": expected " +
                          std::to_string(features_.size()) + " features, got " +
                          std::to_string(row.features.size()));
  }
  if (row.labels.width() != labelNames_.size()) {
    throw StructuralError("row " + std::to_string(index) + ": expected " +
                          std::to_string(labelNames_.size()) + " labels, got " +
                          std::to_string(row.labels.width()));
  }
  for (std::size_t f = 0; f < features_.size(); ++f) {
    const double v = row.features[f];
    if (!std::isfinite(v)) {
      throw DomainError("row " + std::to_string(index) + ", feature '" + features_[f].name +
                        "': value is not finite");
    }
    if (features_[f].isNominal()) {
      const auto size = static_cast<double>(features_[f].domain.size());
      if (v < 0 || v >= size || v != std::floor(v)) {
        throw DomainError("row " + std::to_string(index) + ", feature '" + features_[f].name +
                          "': nominal value index outside domain");
      }
    }
  }
}

Dataset Dataset::withInstances(std::vector<Instance> rows) const {
  Dataset out;
  out.name_ = name_;
  out.features_ = features_;
  out.labelNames_ = labelNames_;
  for (std::size_t i = 0; i < rows.size(); ++i) out.validateRow(rows[i], i);
  out.instances_ = std::move(rows);
  return out;
}

Dataset Dataset::withName(std::string name) const {
  Dataset out = *this;
  out.name_ = std::move(name);
  return out;
}

Dataset buildDataset(std::string name, std::vector<FeatureSpec> features,
                     std::vector<std::string> labelNames, std::vector<Instance> rows) {
  {
    std::unordered_set<std::string> seen;
    for (const auto& l : labelNames) {
      if (!seen.insert(l).second) throw StructuralError("duplicate label name '" + l + "'");
    }
  }
  for (const auto& f : features) {
    if (!f.isNominal()) continue;
    if (f.domain.empty()) throw DomainError("nominal feature '" + f.name + "' has an empty domain");
    std::set<std::string> values(f.domain.begin(), f.domain.end());
    if (values.size() != f.domain.size()) {
      throw DomainError("nominal feature '" + f.name + "' has duplicate values");
    }
  }

  Dataset out;
  out.name_ = std::move(name);
  out.features_ = std::move(features);
  out.labelNames_ = std::move(labelNames);
  for (std::size_t i = 0; i < rows.size(); ++i) out.validateRow(rows[i], i);

  for (std::size_t f = 0; f < out.features_.size(); ++f) {
    auto& spec = out.features_[f];
    spec.min = 0.0;
    spec.max = 0.0;
    if (spec.isNominal() || rows.empty()) continue;
    spec.min = std::numeric_limits<double>::infinity();
    spec.max = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      spec.min = std::min(spec.min, r.features[f]);
      spec.max = std::max(spec.max, r.features[f]);
    }
  }
  out.instances_ = std::move(rows);
  return out;
}

std::vector<std::size_t> labelCounts(const Dataset& data) {
  std::vector<std::size_t> counts(data.labelCount(), 0);
  for (const auto& inst : data.instances()) {
    for (auto l : inst.labels.active()) ++counts[l];
  }
  return counts;
}

std::map<LabelSet, std::vector<std::size_t>> labelsetBags(const Dataset& data) {
  std::map<LabelSet, std::vector<std::size_t>> bags;
  for (std::size_t i = 0; i < data.size(); ++i) bags[data.instance(i).labels].push_back(i);
  return bags;
}

Dataset editInstances(const Dataset& data, std::span<const std::size_t> removals,
                      std::vector<Instance> additions,
                      const std::map<std::size_t, LabelSet>& relabels) {
  std::vector<bool> removed(data.size(), false);
  for (auto r : removals) {
    if (r >= data.size()) {
      throw StructuralError("removal index " + std::to_string(r) + " out of range");
    }
    removed[r] = true;
  }
  for (const auto& [index, labels] : relabels) {
    if (index >= data.size()) {
      throw StructuralError("relabel index " + std::to_string(index) + " out of range");
    }
    if (labels.width() != data.labelCount()) throw StructuralError("relabel width mismatch");
  }

  std::vector<Instance> rows;
  rows.reserve(data.size() + additions.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (removed[i]) continue;
    Instance inst = data.instance(i);
    if (auto it = relabels.find(i); it != relabels.end()) inst.labels = it->second;
    rows.push_back(std::move(inst));
  }
  for (auto& a : additions) rows.push_back(std::move(a));
  return data.withInstances(std::move(rows));
}

std::uint64_t fingerprint(const Dataset& data) {
  Fnv1a h;
  h.u64(data.featureCount());
  for (const auto& f : data.features()) {
    h.str(f.name);
    h.u64(static_cast<std::uint64_t>(f.kind));
    h.u64(f.domain.size());
    for (const auto& v : f.domain) h.str(v);
    h.f64(f.min);
    h.f64(f.max);
  }
  h.u64(data.labelCount());
  for (const auto& l : data.labelNames()) h.str(l);
  h.u64(data.size());
  for (const auto& inst : data.instances()) {
    for (double v : inst.features) h.f64(v);
    for (auto w : inst.labels.words()) h.u64(w);
  }
  return h.value();
}

}  // namespace mlbalance
