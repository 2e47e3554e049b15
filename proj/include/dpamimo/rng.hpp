// Copyright 2026 The dpamimo Authors
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
#include <cstdint>
#include <random>

#include "dpamimo/common.hpp"

namespace dpamimo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream purposes inside one trial.
enum class Stream : std::uint64_t { kChannel = 0, kNoise = 1, kAux = 2 };

/// Counter scheme: seed' = mix(mix(mix(master) ^ trial) ^ stream). The derived
/// stream depends only on (master, trial, stream), never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    Stream stream) noexcept {
  return mix64(mix64(mix64(master) ^ trial) ^ static_cast<std::uint64_t>(stream));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t trial, Stream stream) {
  return Rng(derive_seed(master, trial, stream));
}

/// Draws CN(0, variance).
inline cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double s = std::sqrt(variance / 2.0);
  const double re = n(rng);
  const double im = n(rng);
  return {s * re, s * im};
}

inline cmat complex_normal_matrix(Rng& rng, Index rows, Index cols, double variance) {
  cmat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng, variance);
  return m;
}

}  // namespace dpamimo
