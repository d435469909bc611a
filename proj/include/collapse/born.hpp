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

#include <cstddef>
#include <vector>

#include "collapse/hilbert.hpp"

namespace collapse {

/// Per-sector ensemble averages P_n = sum_k w_k g_n(psi_k) with standard errors.
struct SectorEstimates {
    std::vector<double> values;
    std::vector<double> errors;
};

/// stratum_size groups consecutive members (see weighted_mean); 0 = one stratum.
SectorEstimates born_probabilities(const Ensemble& ensemble, const SectorMap& sectors,
                                   std::size_t stratum_size = 0);

/// P_n(t) sampled along an evolution.
struct BornRecord {
    std::vector<double> times;
    std::vector<SectorEstimates> estimates;

    void append(double time, SectorEstimates estimate);
    /// max over recorded times of |sum_n P_n - 1|.
    double normalization_residual() const;
};

inline constexpr double kDefaultCollapseThreshold = 1e-3;

struct CollapseStatistics {
    /// Weight of members with sector weight >= 1 - epsilon, per sector.
    std::vector<double> fractions;
    /// 1 - sum of fractions.
    double remainder = 1.0;
};

CollapseStatistics collapse_statistics(const Ensemble& ensemble, const SectorMap& sectors,
                                       double epsilon = kDefaultCollapseThreshold);

inline constexpr std::size_t kDefaultPhaseBins = 36;

/// Weighted histogram over [0, 2 pi) of Arg of the dominant (largest modulus)
/// component of sector n, among members collapsed to n.
struct PhaseHistogram {
    std::vector<double> mass;
    /// No member had collapsed to the sector.
    bool empty = true;

    double bin_width() const;
    double total() const;
};

PhaseHistogram phase_profile(const Ensemble& ensemble, const SectorMap& sectors, std::size_t sector,
                             double epsilon = kDefaultCollapseThreshold,
                             std::size_t bins = kDefaultPhaseBins);

}  // namespace collapse
