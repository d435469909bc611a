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

#include "collapse/hilbert.hpp"

#include <cmath>
#include <string>

#include "collapse/error.hpp"
#include "collapse/stats.hpp"

namespace collapse {

StateVector StateVector::from_normalized(Amplitudes amplitudes) {
    require(amplitudes.size() > 0, "StateVector", "dimension must be at least 1");
    const double norm2 = amplitudes.squaredNorm();
    if (!(std::abs(norm2 - 1.0) <= kNormTolerance)) {
        throw NumericalError("StateVector: squared norm " + std::to_string(norm2) +
                             " differs from 1 by more than 1e-12");
    }
    return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis(std::size_t dimension, std::size_t index) {
    require(dimension >= 1, "StateVector.basis", "dimension must be at least 1");
    require(index < dimension, "StateVector.basis", "index out of range");
    Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(dimension));
    a[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(a));
}

StateVector normalize(const Amplitudes& raw) {
    require(raw.size() >= 1, "normalize", "input must have at least one component");
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i].real()) || !std::isfinite(raw[i].imag())) {
            throw PreconditionError("normalize", "non-finite entry at index " + std::to_string(i));
        }
    }
    const double norm = raw.norm();
    require(norm > 0.0, "normalize", "zero norm");
    require(std::isfinite(norm), "normalize", "non-finite norm");
    return StateVector(raw / norm);
}

StateVector normalize(std::span<const Complex> raw) {
    Amplitudes a(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) a[static_cast<Eigen::Index>(i)] = raw[i];
    return normalize(a);
}

StateVector sample_uniform(std::size_t dimension, RandomStream& rng) {
    require(dimension >= 1, "sample_uniform", "dimension must be at least 1");
    Amplitudes a(static_cast<Eigen::Index>(dimension));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        a[i] = Complex(re, im);
    }
    return normalize(a);
}

SectorMap::SectorMap(std::vector<std::size_t> sector_of_index)
    : sector_of_(std::move(sector_of_index)) {
    require(!sector_of_.empty(), "SectorMap", "dimension must be at least 1");
    std::size_t count = 0;
    for (std::size_t s : sector_of_) count = std::max(count, s + 1);
    members_.resize(count);
    position_.resize(sector_of_.size());
    for (std::size_t i = 0; i < sector_of_.size(); ++i) {
        position_[i] = members_[sector_of_[i]].size();
        members_[sector_of_[i]].push_back(i);
    }
    for (std::size_t s = 0; s < count; ++s) {
        require(!members_[s].empty(), "SectorMap",
                "sector labels must be contiguous; sector " + std::to_string(s) + " is empty");
    }
}

SectorMap SectorMap::singletons(std::size_t dimension) {
    std::vector<std::size_t> labels(dimension);
    for (std::size_t i = 0; i < dimension; ++i) labels[i] = i;
    return SectorMap(std::move(labels));
}

SectorMap SectorMap::blocks(std::span<const std::size_t> sizes) {
    std::vector<std::size_t> labels;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        require(sizes[s] > 0, "SectorMap.blocks", "block sizes must be positive");
        labels.insert(labels.end(), sizes[s], s);
    }
    return SectorMap(std::move(labels));
}

std::span<const std::size_t> SectorMap::members(std::size_t sector) const {
    require(sector < members_.size(), "SectorMap", "unknown sector label " + std::to_string(sector));
    return members_[sector];
}

double sector_weight(const StateVector& psi, const SectorMap& sectors, std::size_t sector) {
    require(psi.dimension() == sectors.dimension(), "sector_weight", "dimension mismatch");
    require(sector < sectors.sector_count(), "sector_weight",
            "unknown sector label " + std::to_string(sector));
    double total = 0.0;
    for (std::size_t i : sectors.members(sector)) total += psi.probability(i);
    return total;
}

Complex bilinear(const StateVector& psi, std::size_t i, std::size_t j) {
    require(i < psi.dimension() && j < psi.dimension(), "bilinear", "index out of range");
    return psi[i] * std::conj(psi[j]);
}

Ensemble::Ensemble(std::vector<Member> members, std::uint64_t seed, double time)
    : members_(std::move(members)), seed_(seed), time_(time) {
    if (members_.empty()) return;
    const std::size_t d = members_.front().state.dimension();
    for (const Member& m : members_) {
        require(m.state.dimension() == d, "Ensemble", "members must share one dimension");
        require(m.weight >= 0.0 && std::isfinite(m.weight), "Ensemble", "weights must be nonnegative");
    }
    const auto w = weights();
    const double total = pairwise_sum(w);
    require(std::abs(total - 1.0) <= 1e-12, "Ensemble",
            "weights must sum to 1 (got " + std::to_string(total) + ")");
}

Ensemble Ensemble::replicate(const StateVector& state, std::size_t copies, std::uint64_t seed) {
    std::vector<Member> members(copies, Member{state, 1.0 / static_cast<double>(copies)});
    return Ensemble(std::move(members), seed);
}

Ensemble Ensemble::expand(const Ensemble& decomposition, std::size_t copies, std::uint64_t seed) {
    require(copies > 0, "Ensemble.expand", "copies must be positive");
    std::vector<Member> members;
    members.reserve(decomposition.size() * copies);
    for (const Member& m : decomposition.members()) {
        members.insert(members.end(), copies, Member{m.state, m.weight / static_cast<double>(copies)});
    }
    return Ensemble(std::move(members), seed, decomposition.time());
}

std::size_t Ensemble::dimension() const noexcept {
    return members_.empty() ? 0 : members_.front().state.dimension();
}

std::vector<double> Ensemble::weights() const {
    std::vector<double> w;
    w.reserve(members_.size());
    for (const Member& m : members_) w.push_back(m.weight);
    return w;
}

}  // namespace collapse
