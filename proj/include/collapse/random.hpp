// Copyright 2026 The collapse-lab Authors
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

#include <array>
#include <cstdint>
#include <limits>

namespace collapse {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is split into a 64-bit block index (words 0-1) and a
/// 64-bit stream id (words 2-3); the 64-bit key is the seed. Two streams with
/// different ids never overlap, so every ensemble member can own a stream
/// derived from (seed, member index) with no coordination between workers.
///
/// Distributions are implemented here rather than through <random> so that
/// draws are identical across standard library implementations.
class RandomStream {
  public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal (Box-Muller, pairs cached).
    double normal() noexcept;
    /// Exponential with the given rate; rate must be positive.
    double exponential(double rate) noexcept;

    /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
    static Block philox(Block counter, std::array<std::uint32_t, 2> key) noexcept;

  private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    Block counter_;
    Block buffer_{};
    unsigned position_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed for (seed, salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace collapse
