// Copyright 2026 The ptsim Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ptsim {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream from a master seed and up to two salts.
// Used to give every device / repetition / subsystem its own generator
// so that permuting unrelated inputs cannot perturb a stream.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt_a,
                            uint64_t salt_b = 0) {
  uint64_t s = seed;
  uint64_t h = splitmix64(s);
  s ^= salt_a * 0x9e3779b97f4a7c15ull;
  h ^= splitmix64(s);
  s ^= salt_b * 0xc2b2ae3d27d4eb4full;
  h ^= splitmix64(s);
  return h;
}

inline Rng make_stream(uint64_t seed, uint64_t salt_a, uint64_t salt_b = 0) {
  return Rng(derive_seed(seed, salt_a, salt_b));
}

// Uniform on (0, 1), exactly one engine draw.
inline double uniform_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller; always consumes exactly two draws so streams stay aligned.
// sigma == 0 consumes nothing and returns the mean.
inline double normal_sample(Rng& rng, double mean, double sigma) {
  if (sigma == 0.0) return mean;
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ptsim
