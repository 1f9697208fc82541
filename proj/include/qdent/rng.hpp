// Copyright 2026 The qdent Authors
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

// Counter-based random numbers: every variate is a pure function of
// (seed, index, lane), so a sample can be regenerated independently of the
// order in which samples are visited or the worker that visits them.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qdent::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64 random bits for the given (seed, index, lane) triple.
inline constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ (lane * 0xd1b54a32d192ed03ULL));
}

/// Uniform in the open interval (0, 1); 52 bits of resolution, so the
/// largest value 1 − 2⁻⁵³ is still representable.
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal variate derived from (seed, index) by Box–Muller.
inline double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const double u1 = to_open_unit(counter_bits(seed, index, 0));
  const double u2 = to_open_unit(counter_bits(seed, index, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qdent::rng
