#pragma once

#include <cmath>
#include <cstdint>

#include "gapcap/constants.hpp"

namespace gapcap {

// Counter-based pseudo-random source. Every draw is a pure function of
// (seed, stream, index), so traces and Monte Carlo trials are reproducible
// and independent of evaluation order or parallel scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // Uniform in [0, 1).
  double uniform(std::uint64_t index) const {
    return static_cast<double>(mix(index, 0) >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; never returns 0 so log() is safe.
  double uniform_open(std::uint64_t index) const {
    return (static_cast<double>(mix(index, 0) >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two independent substreams.
  double gaussian(std::uint64_t index) const {
    const double u1 = (static_cast<double>(mix(index, 1) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(mix(index, 2) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Uniform in [-1, 1).
  double symmetric(std::uint64_t index) const {
    return 2.0 * uniform(index) - 1.0;
  }

 private:
  // SplitMix64 finalizer over the combined counter.
  std::uint64_t mix(std::uint64_t index, std::uint64_t lane) const {
    std::uint64_t z = seed_ * 0x9e3779b97f4a7c15ull + stream_ * 0xbf58476d1ce4e5b9ull +
                      index * 0x94d049bb133111ebull + lane * 0xd6e8feb86659fd93ull +
                      0x2545f4914f6cdd1dull;
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace gapcap
