#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mlbalance {

enum class FeatureKind { numeric, nominal };

/// Describes one input attribute. Numeric bounds are recorded when the
/// dataset is built and then stay frozen through every edit, so that
/// synthetic instances are normalized against the original ranges.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> domain;  // nominal only, ordered
  double min = 0.0;                 // numeric only
  double max = 0.0;

  static FeatureSpec numeric(std::string name);
  static FeatureSpec nominal(std::string name, std::vector<std::string> values);

  bool isNominal() const { return kind == FeatureKind::nominal; }
  double range() const { return max - min; }

  bool operator==(const FeatureSpec&) const = default;
};

/// Fixed-width set of active labels. Comparison is exact bit equality; the
/// ordering is total so label sets can key ordered maps deterministically.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t width);
  LabelSet(std::size_t width, std::initializer_list<std::size_t> active);

  std::size_t width() const { return width_; }
  bool test(std::size_t label) const;
  void set(std::size_t label, bool value = true);
  void reset(std::size_t label) { set(label, false); }

  std::size_t count() const;
  bool none() const { return count() == 0; }
  bool any() const { return !none(); }
  std::vector<std::size_t> active() const;

  LabelSet operator&(const LabelSet& other) const;
  LabelSet operator|(const LabelSet& other) const;
  LabelSet operator^(const LabelSet& other) const;

  bool operator==(const LabelSet&) const = default;
  std::strong_ordering operator<=>(const LabelSet& other) const;

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void checkWidth(const LabelSet& other) const;

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Nominal values are stored as their domain index.
struct Instance {
  std::vector<double> features;
  LabelSet labels;

  bool operator==(const Instance&) const = default;
};

/// An immutable multilabel dataset. Instance positions are identities:
/// caches built for one dataset value are invalid for any edited copy.
class Dataset {
 public:
  Dataset() = default;

  const std::string& name() const { return name_; }
  std::span<const FeatureSpec> features() const { return features_; }
  const FeatureSpec& feature(std::size_t f) const { return features_[f]; }
  std::span<const std::string> labelNames() const { return labelNames_; }
  std::span<const Instance> instances() const { return instances_; }
  const Instance& instance(std::size_t i) const { return instances_[i]; }

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t featureCount() const { return features_.size(); }
  std::size_t labelCount() const { return labelNames_.size(); }

  /// Same schema, frozen bounds and name; new rows (validated).
  Dataset withInstances(std::vector<Instance> rows) const;
  Dataset withName(std::string name) const;

  bool operator==(const Dataset&) const = default;

 private:
  friend Dataset buildDataset(std::string, std::vector<FeatureSpec>,
                              std::vector<std::string>, std::vector<Instance>);

  void validateRow(const Instance& row, std::size_t index) const;

  std::string name_;
  std::vector<FeatureSpec> features_;
  std::vector<std::string> labelNames_;
  std::vector<Instance> instances_;
};

/// Validates the schema and every row, then records numeric min/max from the
/// rows (0/0 when there are none).
Dataset buildDataset(std::string name, std::vector<FeatureSpec> features,
                     std::vector<std::string> labelNames, std::vector<Instance> rows);

std::vector<std::size_t> labelCounts(const Dataset& data);

/// Partitions instance indices by exact labelset. Bags are keyed in
/// LabelSet order; member lists are ascending.
std::map<LabelSet, std::vector<std::size_t>> labelsetBags(const Dataset& data);

/// Removes, relabels and appends in one pass. Survivors keep their relative
/// order; additions follow in the given order. The input is not modified.
Dataset editInstances(const Dataset& data, std::span<const std::size_t> removals,
                      std::vector<Instance> additions = {},
                      const std::map<std::size_t, LabelSet>& relabels = {});

/// 64-bit content hash binding caches to one dataset value.
std::uint64_t fingerprint(const Dataset& data);

}  // namespace mlbalance
