#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlbalance/dataset.hpp"
#include "mlbalance/neighbors.hpp"

namespace mlbalance {

enum class Algorithm {
  LPROS,
  MLROS,
  MLSMOTE,
  MLSOL,
  MLRkNNOS,
  LPRUS,
  MLRUS,
  MLeNN,
  MLTL,
  MLUL,
  REMEDIAL,
};

inline constexpr std::array kAllAlgorithms = {
    Algorithm::LPROS, Algorithm::MLROS, Algorithm::MLSMOTE, Algorithm::MLSOL,
    Algorithm::MLRkNNOS, Algorithm::LPRUS, Algorithm::MLRUS, Algorithm::MLeNN,
    Algorithm::MLTL, Algorithm::MLUL, Algorithm::REMEDIAL,
};

std::string_view algorithmName(Algorithm algorithm);

/// Case-insensitive lookup of the identifiers above.
std::optional<Algorithm> parseAlgorithm(std::string_view name);

/// True for the six algorithms that query nearest neighbors.
bool needsNeighbors(Algorithm algorithm);

struct AlgorithmParams {
  std::optional<double> percentage;
  std::optional<std::size_t> k;
  std::optional<double> threshold;

  bool operator==(const AlgorithmParams&) const = default;
};

struct AlgorithmSpec {
  Algorithm algorithm;
  AlgorithmParams params;  // exactly the parameters the algorithm takes
};

/// Which parameters an algorithm accepts.
bool takesPercentage(Algorithm algorithm);
bool takesK(Algorithm algorithm);
bool takesThreshold(Algorithm algorithm);

/// Fills defaults (P = 25, k = 3 or 5 for MLSMOTE, threshold = 0.5) and
/// applies `overrides`. With `strict`, an override the algorithm does not
/// take is a SpecError; otherwise it is ignored (batch runs share one set of
/// overrides across algorithms). Values are range-checked.
AlgorithmSpec makeSpec(Algorithm algorithm, const AlgorithmParams& overrides = {},
                       bool strict = true);

/// Runs one algorithm. `seed` seeds the algorithm's own generator.
Dataset applyAlgorithm(const AlgorithmSpec& spec, const Dataset& data, std::uint64_t seed,
                       SharedStructures shared = {}, std::vector<std::string>* warnings = nullptr);

}  // namespace mlbalance
