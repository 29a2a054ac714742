#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mlbalance/dataset.hpp"

namespace mlbalance {

/// Per-label imbalance ratio; nullopt marks a label with no positive instances.
using IrLbl = std::vector<std::optional<double>>;

struct ScumbleScores {
  std::vector<double> perInstance;
  double mean = 0.0;
};

struct LabelPartition {
  std::vector<std::size_t> minority;  // irlbl > MeanIR
  std::vector<std::size_t> majority;  // irlbl defined and <= MeanIR
};

/// Everything the resamplers need to know about a dataset's imbalance.
struct ImbalanceProfile {
  std::vector<std::size_t> counts;
  IrLbl irlbl;
  double meanIR = 1.0;
  std::vector<double> scumbleIns;
  double scumble = 0.0;
  std::vector<std::size_t> minorityLabels;
  std::vector<std::size_t> majorityLabels;

  bool isMinority(std::size_t label) const;
  /// Labels whose irlbl is strictly above MeanIR, as a mask over the alphabet.
  LabelSet minorityMask() const;
};

/// irlbl(l) = max count / count(l). Throws MetricError("no active labels")
/// when every count is zero.
IrLbl computeIRLbl(std::span<const std::size_t> counts);
IrLbl computeIRLbl(const Dataset& data);

/// Mean of the defined irlbl values.
double computeMeanIR(const IrLbl& irlbl);
double computeMeanIR(const Dataset& data);

/// 1 - geometric/arithmetic mean of the instance's label irlbl values; 0 for
/// instances with at most one label. The dataset score averages over all
/// instances, empty ones included.
ScumbleScores computeScumble(const Dataset& data, const IrLbl& irlbl);
ScumbleScores computeScumble(const Dataset& data);

LabelPartition minorityMajoritySplit(const IrLbl& irlbl, double meanIR);
LabelPartition minorityMajoritySplit(const ImbalanceProfile& profile);

ImbalanceProfile computeProfile(const Dataset& data);

}  // namespace mlbalance
