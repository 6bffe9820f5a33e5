// Copyright 2026 The hydrochain Authors
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

#include <cstdint>
#include <random>

#include "hydrochain/common.hpp"

namespace hydrochain {

// SplitMix64 output function.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of stream `index` under `root`: the index-th SplitMix64 output
// started from `root`, i.e. mix(root + (index + 1) * golden_gamma). Streams
// depend only on (root, index), never on scheduling.
inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64_mix(root + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream for_trajectory(std::uint64_t root, std::uint64_t index) {
    return RandomStream(stream_seed(root, index));
  }

  // Uniform on (0, 1], 53 random bits.
  double uniform_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

  // Uniform integer in [0, n), multiply-shift reduction.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hydrochain
