/* Copyright 2026 The urgent-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Counter-based random numbers: every value is a pure function of
// (key, draw index), so results do not depend on evaluation order.

#ifndef URGENT_RNG_H_
#define URGENT_RNG_H_

#include <cstddef>
#include <cstdint>

namespace urgent {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Key for entry `index` under `master`. Distinct indices give distinct keys
// because mix64 is invertible.
constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ 0x6A09E667F3BCC909ULL) + index);
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }

  // Element `draw` of the splitmix64 stream seeded with the key.
  constexpr std::uint64_t bits(std::uint64_t draw) const noexcept {
    return mix64(key_ + (draw + 1) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t draw) const noexcept {
    return static_cast<double>(bits(draw) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t draw, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(draw);
  }

  // Uniform in [0, n); n must be positive.
  std::size_t index(std::uint64_t draw, std::size_t n) const noexcept {
    const auto wide = static_cast<unsigned __int128>(bits(draw)) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

  bool bernoulli(std::uint64_t draw, double p) const noexcept { return uniform(draw) < p; }

 private:
  std::uint64_t key_;
};

}  // namespace urgent

#endif  // URGENT_RNG_H_
