//
// Copyright 2026 The cldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Counter-based random streams. A stream is a 64-bit key; the n-th draw is a
// SplitMix64 finalization of key + n * golden-gamma, so a stream's output is a
// pure function of (seed, stream path, position). Named substreams give every
// release query / HDCR node / entry its own independent source.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cldp {

namespace internal {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a; stable across platforms, unlike std::hash.
inline constexpr std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace internal

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : key_(internal::Mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  // Independent child stream; does not consume draws from this one.
  RandomStream Substream(std::string_view name) const {
    return RandomStream(Key{internal::Mix64(key_ ^ internal::HashName(name))});
  }
  RandomStream Substream(std::uint64_t index) const {
    return RandomStream(
        Key{internal::Mix64(key_ + internal::Mix64(index + internal::kGoldenGamma))});
  }

  std::uint64_t NextU64() {
    ++counter_;
    return internal::Mix64(key_ + counter_ * internal::kGoldenGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1).
  double UniformOpen() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection removes modulo bias.
  std::uint64_t UniformIndex(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = NextU64();
    } while (x >= limit);
    return x % n;
  }

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale) {
    const double u = UniformOpen() - 0.5;
    const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
    return u < 0 ? -magnitude : magnitude;
  }

  std::uint64_t position() const { return counter_; }

 private:
  struct Key {
    std::uint64_t value;
  };
  explicit RandomStream(Key key) : key_(key.value) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cldp
