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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "collapse/random.hpp"

namespace collapse {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

/// Tolerance on sum |psi_i|^2 = 1 carried by every StateVector.
inline constexpr double kNormTolerance = 1e-12;

/// A normalized state vector of fixed dimension. Global phase is kept.
class StateVector {
  public:
    /// Wraps amplitudes that are already normalized; throws if the norm is off
    /// by more than kNormTolerance.
    static StateVector from_normalized(Amplitudes amplitudes);
    /// Basis vector e_index of the given dimension.
    static StateVector basis(std::size_t dimension, std::size_t index);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }
    double probability(std::size_t i) const { return std::norm((*this)[i]); }

  private:
    explicit StateVector(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {}
    friend StateVector normalize(const Amplitudes& raw);

    Amplitudes amplitudes_;
};

/// raw / ||raw||. Rejects empty input, non-finite entries and zero norm.
StateVector normalize(const Amplitudes& raw);
StateVector normalize(std::span<const Complex> raw);

/// Draw from the unitary-invariant measure on the unit sphere of C^d:
/// d independent standard complex Gaussians, normalized.
StateVector sample_uniform(std::size_t dimension, RandomStream& rng);

/// Assignment of basis indices to pointer sectors (n, r). Sector labels and
/// within-sector labels are zero-based and contiguous.
class SectorMap {
  public:
    explicit SectorMap(std::vector<std::size_t> sector_of_index);

    /// Every basis index is its own sector.
    static SectorMap singletons(std::size_t dimension);
    /// Consecutive blocks of the given sizes.
    static SectorMap blocks(std::span<const std::size_t> sizes);

    std::size_t dimension() const noexcept { return sector_of_.size(); }
    std::size_t sector_count() const noexcept { return members_.size(); }
    std::size_t sector_of(std::size_t index) const { return sector_of_.at(index); }
    std::size_t position_in_sector(std::size_t index) const { return position_.at(index); }
    std::span<const std::size_t> members(std::size_t sector) const;

  private:
    std::vector<std::size_t> sector_of_;
    std::vector<std::size_t> position_;
    std::vector<std::vector<std::size_t>> members_;
};

/// g_n(psi) = sum_r |psi_{nr}|^2.
double sector_weight(const StateVector& psi, const SectorMap& sectors, std::size_t sector);

/// psi_i * conj(psi_j).
Complex bilinear(const StateVector& psi, std::size_t i, std::size_t j);

struct Member {
    StateVector state;
    double weight;
};

/// Weighted particle representation of a distribution over state vectors.
class Ensemble {
  public:
    Ensemble() = default;
    Ensemble(std::vector<Member> members, std::uint64_t seed, double time = 0.0);

    /// n copies of one state with equal weights.
    static Ensemble replicate(const StateVector& state, std::size_t copies, std::uint64_t seed);
    /// Each member of `decomposition` repeated `copies` times, weight split
    /// evenly. Copies of one member are contiguous (one stratum each).
    static Ensemble expand(const Ensemble& decomposition, std::size_t copies, std::uint64_t seed);

    bool empty() const noexcept { return members_.empty(); }
    std::size_t size() const noexcept { return members_.size(); }
    /// Shared dimension; 0 for an empty ensemble.
    std::size_t dimension() const noexcept;
    const std::vector<Member>& members() const noexcept { return members_; }
    const Member& operator[](std::size_t k) const { return members_[k]; }
    std::vector<double> weights() const;
    std::uint64_t seed() const noexcept { return seed_; }
    double time() const noexcept { return time_; }

  private:
    std::vector<Member> members_;
    std::uint64_t seed_ = 0;
    double time_ = 0.0;
};

}  // namespace collapse
