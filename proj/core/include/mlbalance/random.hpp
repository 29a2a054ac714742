#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace mlbalance {

/// Seedable generator with a platform-independent stream. The engine is
/// std::mt19937_64, whose output sequence is fixed by the standard; the
/// distributions below are implemented here because the standard library's
/// are not portable across vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniformIndex(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniformReal();

 private:
  std::mt19937_64 engine_;
};

/// Per-algorithm seed for batch runs: mixes the master seed with the
/// algorithm identifier so every algorithm sees an independent stream.
std::uint64_t deriveSeed(std::uint64_t master, std::string_view algorithm);

}  // namespace mlbalance
