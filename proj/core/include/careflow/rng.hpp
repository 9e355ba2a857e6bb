// Copyright 2026 The Careflow Authors
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

#ifndef CAREFLOW_RNG_HPP
#define CAREFLOW_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace careflow {

// The standard <random> distributions are implementation-defined, so the same
// seed can produce different streams under different standard libraries. The
// helpers below draw directly from the mt19937_64 output, making every seeded
// artifact (weights, shuffles, synthetic data) reproducible across toolchains.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased uniform integer in [0, n) via rejection sampling; n >= 1.
inline std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Standard normal via Box-Muller (consumes two uniforms per call).
inline double gaussian(std::mt19937_64& rng) {
  double u1;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Fisher-Yates shuffle using bounded_uint.
template <typename T>
void shuffle_vector(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace careflow

#endif  // CAREFLOW_RNG_HPP
