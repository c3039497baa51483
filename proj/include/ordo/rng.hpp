// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>

namespace ordo {

// The single PRNG used for every randomized operation in this library.
//
// Algorithm: SplitMix64 (Sebastiano Vigna, public domain reference
// implementation). The 64-bit user seed is the initial state verbatim; each
// call advances the state by the golden-gamma constant and returns the mixed
// value. This generator, the rejection scheme in below(), and the shuffle in
// fisher_yates() together form the reproducibility contract: any conforming
// implementation must produce bit-identical permutations for equal seeds.
//
// Reference vector: seed 0 yields 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4,
// 0x06c45d188009454f, ...
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound). Draws 64-bit words, rejects values below
  // 2^64 mod bound, returns the remainder. bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates: for i = n-1 down to 1, swap a[i] with a[below(i+1)].
// Empty and singleton ranges consume no randomness.
template <typename RandomIt>
void fisher_yates(RandomIt first, RandomIt last, SplitMix64& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace ordo
