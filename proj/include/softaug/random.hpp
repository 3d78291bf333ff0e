// Copyright (c) 2026, The softaug Authors. All rights reserved.
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
#include <limits>

namespace softaug {

/// Counter-based 64-bit generator.
///
/// Output i is a SplitMix64 finalization of (key + i * golden), so the state
/// is just (key, counter). split() derives an independent stream from the
/// current key and a caller-chosen stream id without advancing this source,
/// which lets per-sample streams be assigned deterministically regardless of
/// evaluation order. Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed = 0) : key_(mix(seed ^ kSeedSalt)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGolden * ++counter_); }

  RandomSource split(std::uint64_t stream) const {
    RandomSource child;
    child.key_ = mix(key_ ^ mix(stream + kStreamSalt));
    return child;
  }

  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const RandomSource&, const RandomSource&) = default;

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5AD0A06A5EEDULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace softaug
