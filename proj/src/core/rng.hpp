// Copyright 2026 The batchpref Authors
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

#ifndef BATCHPREF_CORE_RNG_HPP_
#define BATCHPREF_CORE_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace batchpref {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t x);

// Derives a child seed from a base seed and a sequence of stream tags, so that
// e.g. query i of a dataset gets the same stream no matter who generates it.
std::uint64_t DeriveSeed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

// Uniform double in [0, 1) built from the top 53 bits; identical across
// standard library implementations, unlike std::uniform_real_distribution.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformIn(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

// Uniform integer in [0, n) by rejection, portable across implementations.
std::uint64_t UniformIndex(Rng& rng, std::uint64_t n);

// Standard normal via Box-Muller on Uniform01 draws.
double StandardNormal(Rng& rng);

}  // namespace batchpref

#endif  // BATCHPREF_CORE_RNG_HPP_
