//
// Copyright 2026 The shuffledp Authors
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


#ifndef SHUFFLEDP_RANDOM_H_
#define SHUFFLEDP_RANDOM_H_

#include <cstdint>
#include <random>

namespace shuffledp {

// Seeded source of randomness keyed by (seed, stream). Two sources with the
// same key produce identical draws; sources with different streams are
// treated as independent. Not thread-safe: each worker owns its own source.
class RandomSource {
 public:
  using Engine = std::mt19937_64;

  explicit RandomSource(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(Mix(seed, stream)) {}

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

  // Child source for a sub-task (user, trial, instance). Deterministic in
  // (seed, stream, child) and independent of how many draws this source has
  // already made.
  RandomSource Fork(uint64_t child) const {
    return RandomSource(seed_, SplitMix64(stream_ ^ SplitMix64(child + kGolden)));
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to take the logarithm of.
  double UniformPositive() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  Engine& engine() { return engine_; }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static constexpr uint64_t SplitMix64(uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static constexpr uint64_t Mix(uint64_t seed, uint64_t stream) {
    return SplitMix64(SplitMix64(seed) ^ (stream * kGolden + 1));
  }

  uint64_t seed_;
  uint64_t stream_;
  Engine engine_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_RANDOM_H_
