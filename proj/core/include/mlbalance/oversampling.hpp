#pragma once

#include <cstddef>

#include "mlbalance/dataset.hpp"
#include "mlbalance/neighbors.hpp"
#include "mlbalance/random.hpp"

namespace mlbalance {

/// round(size * percentage / 100), halves away from zero.
std::size_t percentageTarget(std::size_t size, double percentage);

/// Label-powerset random oversampling. Labelset bags smaller than the mean
/// bag size are topped up with clones, smallest bags first, each bag capped
/// at floor(mean); at most percentageTarget(|D|, P) clones are added.
Dataset lpros(const Dataset& data, double percentage, Rng& rng);

/// Clones random carriers of minority labels, round-robin across labels,
/// until each label's IRLbl falls to the input MeanIR or the clone budget is
/// spent.
Dataset mlros(const Dataset& data, double percentage, Rng& rng);

/// Synthetic minority oversampling. For every label that is a minority
/// label at the start of its turn (IRLbl and MeanIR recomputed over the
/// grown dataset), each original carrier spawns one synthetic instance from
/// its within-bag neighbors.
Dataset mlsmote(const Dataset& data, std::size_t k, Rng& rng, SharedStructures shared = {});

/// Local-imbalance oversampling: seeds are drawn in proportion to how
/// surrounded they are by the opposite value of their minority labels, and
/// synthetic labels depend on where the new point lands between seed and
/// reference. Adds exactly percentageTarget(|D|, P) instances.
Dataset mlsol(const Dataset& data, double percentage, std::size_t k, Rng& rng,
              SharedStructures shared = {});

/// Reverse-nearest-neighbor oversampling for each minority label; copies the
/// seed's labelset onto every synthetic instance.
Dataset mlrknnos(const Dataset& data, std::size_t k, Rng& rng, SharedStructures shared = {});

}  // namespace mlbalance
