// Copyright 2026 dqtraj contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace dqt {

namespace detail {
inline std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-addressable avalanche hash (SplitMix64 finalizer). The same
/// (seed, index) pair always yields the same value, for any index in Z;
/// this is what makes the shift two-sided.
inline std::uint64_t mix64(std::uint64_t seed, std::int64_t index) {
  return detail::splitmix_finalize(
      seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(index));
}

inline std::uint64_t mix64(std::uint64_t seed, std::int64_t a, std::int64_t b) {
  return mix64(mix64(seed, a), b);
}

/// Minimal deterministic random stream (SplitMix64). Never shared between
/// workers; derive per-task streams with mix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::splitmix_finalize(state_);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  /// Standard complex normal: variance 1 split across re/im.
  std::complex<double> complex_normal() {
    return {normal() * M_SQRT1_2, normal() * M_SQRT1_2};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dqt
