/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>

namespace iondet {

/// SplitMix64: a tiny 64-bit generator with a splittable counter-based
/// state. Chosen over <random> engines-plus-distributions because its output
/// stream is fixed by the algorithm, so seeded runs are reproducible across
/// platforms and standard libraries.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Independent generator for substream `index` of this seed.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0xbf58476d1ce4e5b9ull * (index + 1)));
    mix.next();
    return mix;
  }

private:
  std::uint64_t state_;
};

} // namespace iondet
