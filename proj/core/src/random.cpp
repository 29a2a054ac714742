#include "mlbalance/random.hpp"

#include <cassert>
#include <limits>

namespace mlbalance {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t Rng::uniformIndex(std::size_t n) {
  assert(n > 0);
  const std::uint64_t range = n;
  // Rejection sampling over the largest multiple of n below 2^64.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double Rng::uniformReal() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t deriveSeed(std::uint64_t master, std::string_view algorithm) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : algorithm) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

}  // namespace mlbalance
