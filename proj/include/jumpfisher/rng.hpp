// Copyright 2026 The jumpfisher Authors
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

namespace jumpfisher {

/// Counter-based random stream: output j of stream s under seed x is a
/// pure function of (x, s, j), so trajectories can be generated on any
/// thread in any order and still reproduce bit for bit. The generator is
/// the splitmix64 finalizer over a Weyl sequence keyed by (seed, stream).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))),
        seed_(seed),
        stream_(stream) {}

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix(base_ + counter_);
  }

  /// Uniform draw strictly inside (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace jumpfisher
