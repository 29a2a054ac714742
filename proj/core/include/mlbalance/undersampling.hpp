#pragma once

#include <cstddef>

#include "mlbalance/dataset.hpp"
#include "mlbalance/neighbors.hpp"
#include "mlbalance/random.hpp"

namespace mlbalance {

/// |Y1 xor Y2| / (|Y1| + |Y2|); 0 when both are empty.
double adjustedHamming(const LabelSet& a, const LabelSet& b);

/// Label-powerset random undersampling. Bags larger than the mean bag size
/// lose random members, largest first, down to ceil(mean).
Dataset lprus(const Dataset& data, double percentage, Rng& rng);

/// Deletes random instances that carry majority labels and no minority
/// label, round-robin across majority labels.
Dataset mlrus(const Dataset& data, double percentage, Rng& rng);

/// Edited nearest neighbor: an instance without minority labels is removed
/// when at least ceil(k/2) of its k neighbors differ from it by more than
/// `threshold` in adjusted Hamming distance.
Dataset mlenn(const Dataset& data, double threshold, std::size_t k, SharedStructures shared = {});

/// Tomek links: mutual 1-NN pairs whose labelsets differ by at least
/// `threshold`. Members without minority labels are removed.
Dataset mltl(const Dataset& data, double threshold, SharedStructures shared = {});

/// Local-imbalance undersampling: removes the instances that most disturb
/// their reverse neighbors' minority values, never deleting the last
/// carrier of a label.
Dataset mlul(const Dataset& data, double percentage, std::size_t k, Rng& rng,
             SharedStructures shared = {});

}  // namespace mlbalance
