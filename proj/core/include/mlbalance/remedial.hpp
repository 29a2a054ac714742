#pragma once

#include <string>
#include <vector>

#include "mlbalance/dataset.hpp"

namespace mlbalance {

/// Decouples minority and majority labels. Every instance whose SCUMBLE
/// exceeds the dataset mean keeps its majority labels in place, and a copy
/// carrying only its minority labels is appended (in original index order).
/// Instances whose labels are all of one kind cannot be split; they are left
/// untouched and reported through `warnings` when given.
Dataset remedial(const Dataset& data, std::vector<std::string>* warnings = nullptr);

}  // namespace mlbalance
