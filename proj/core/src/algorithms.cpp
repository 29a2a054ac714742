#include "mlbalance/algorithms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mlbalance/errors.hpp"
#include "mlbalance/oversampling.hpp"
#include "mlbalance/random.hpp"
#include "mlbalance/remedial.hpp"
#include "mlbalance/undersampling.hpp"

namespace mlbalance {

std::string_view algorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::LPROS: return "LPROS";
    case Algorithm::MLROS: return "MLROS";
    case Algorithm::MLSMOTE: return "MLSMOTE";
    case Algorithm::MLSOL: return "MLSOL";
    case Algorithm::MLRkNNOS: return "MLRkNNOS";
    case Algorithm::LPRUS: return "LPRUS";
    case Algorithm::MLRUS: return "MLRUS";
    case Algorithm::MLeNN: return "MLeNN";
    case Algorithm::MLTL: return "MLTL";
    case Algorithm::MLUL: return "MLUL";
    case Algorithm::REMEDIAL: return "REMEDIAL";
  }
  return "?";
}

std::optional<Algorithm> parseAlgorithm(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const auto wanted = lower(name);
  for (auto a : kAllAlgorithms) {
    if (lower(algorithmName(a)) == wanted) return a;
  }
  return std::nullopt;
}

bool needsNeighbors(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::MLSMOTE:
    case Algorithm::MLSOL:
    case Algorithm::MLRkNNOS:
    case Algorithm::MLeNN:
    case Algorithm::MLTL:
    case Algorithm::MLUL: return true;
    default: return false;
  }
}

bool takesPercentage(Algorithm a) {
  return a == Algorithm::LPROS || a == Algorithm::MLROS || a == Algorithm::MLSOL ||
         a == Algorithm::LPRUS || a == Algorithm::MLRUS || a == Algorithm::MLUL;
}

bool takesK(Algorithm a) {
  return a == Algorithm::MLSMOTE || a == Algorithm::MLSOL || a == Algorithm::MLRkNNOS ||
         a == Algorithm::MLeNN || a == Algorithm::MLUL;
}

bool takesThreshold(Algorithm a) { return a == Algorithm::MLeNN || a == Algorithm::MLTL; }

AlgorithmSpec makeSpec(Algorithm algorithm, const AlgorithmParams& overrides, bool strict) {
  const std::string name(algorithmName(algorithm));
  auto reject = [&](const char* param) {
    throw SpecError(name + " does not take parameter '" + param + "'");
  };
  if (strict) {
    if (overrides.percentage && !takesPercentage(algorithm)) reject("P");
    if (overrides.k && !takesK(algorithm)) reject("k");
    if (overrides.threshold && !takesThreshold(algorithm)) reject("threshold");
  }

  AlgorithmSpec spec{algorithm, {}};
  const bool undersampler = algorithm == Algorithm::LPRUS || algorithm == Algorithm::MLRUS ||
                            algorithm == Algorithm::MLUL;
  if (takesPercentage(algorithm)) {
    const double p = overrides.percentage.value_or(25.0);
    if (!std::isfinite(p) || p <= 0.0 || (undersampler && p >= 100.0)) {
      throw SpecError(name + ": P out of range");
    }
    spec.params.percentage = p;
  }
  if (takesK(algorithm)) {
    const std::size_t k = overrides.k.value_or(algorithm == Algorithm::MLSMOTE ? 5 : 3);
    if (k < 1) throw SpecError(name + ": k must be at least 1");
    spec.params.k = k;
  }
  if (takesThreshold(algorithm)) {
    const double t = overrides.threshold.value_or(0.5);
    if (!(t > 0.0 && t <= 1.0)) throw SpecError(name + ": threshold must lie in (0, 1]");
    spec.params.threshold = t;
  }
  return spec;
}

Dataset applyAlgorithm(const AlgorithmSpec& spec, const Dataset& data, std::uint64_t seed,
                       SharedStructures shared, std::vector<std::string>* warnings) {
  Rng rng(seed);
  const auto& p = spec.params;
  auto need = [&](const auto& value, const char* param) {
    if (!value) {
      throw SpecError(std::string(algorithmName(spec.algorithm)) + ": missing parameter " + param);
    }
    return *value;
  };
  switch (spec.algorithm) {
    case Algorithm::LPROS: return lpros(data, need(p.percentage, "P"), rng);
    case Algorithm::MLROS: return mlros(data, need(p.percentage, "P"), rng);
    case Algorithm::MLSMOTE: return mlsmote(data, need(p.k, "k"), rng, shared);
    case Algorithm::MLSOL: return mlsol(data, need(p.percentage, "P"), need(p.k, "k"), rng, shared);
    case Algorithm::MLRkNNOS: return mlrknnos(data, need(p.k, "k"), rng, shared);
    case Algorithm::LPRUS: return lprus(data, need(p.percentage, "P"), rng);
    case Algorithm::MLRUS: return mlrus(data, need(p.percentage, "P"), rng);
    case Algorithm::MLeNN: return mlenn(data, need(p.threshold, "threshold"), need(p.k, "k"), shared);
    case Algorithm::MLTL: return mltl(data, need(p.threshold, "threshold"), shared);
    case Algorithm::MLUL: return mlul(data, need(p.percentage, "P"), need(p.k, "k"), rng, shared);
    case Algorithm::REMEDIAL: return remedial(data, warnings);
  }
  throw SpecError("unknown algorithm");
}

}  // namespace mlbalance
