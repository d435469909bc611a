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

#include "collapse/born.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "collapse/error.hpp"
#include "collapse/stats.hpp"

namespace collapse {
namespace {

void check_epsilon(double epsilon, const char* where) {
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0, where,
            "collapse threshold must satisfy 0 < epsilon < 1 (got " + std::to_string(epsilon) + ")");
}

}  // namespace

SectorEstimates born_probabilities(const Ensemble& ensemble, const SectorMap& sectors,
                                   std::size_t stratum_size) {
    require(!ensemble.empty(), "born_probabilities", "ensemble is empty");
    require(ensemble.dimension() == sectors.dimension(), "born_probabilities", "dimension mismatch");
    const auto weights = ensemble.weights();
    SectorEstimates out;
    std::vector<double> values(ensemble.size());
    for (std::size_t n = 0; n < sectors.sector_count(); ++n) {
        for (std::size_t k = 0; k < ensemble.size(); ++k) values[k] = sector_weight(ensemble[k].state, sectors, n);
        const Estimate e = weighted_mean(values, weights, stratum_size);
        out.values.push_back(e.value);
        out.errors.push_back(e.error);
    }
    return out;
}

void BornRecord::append(double time, SectorEstimates estimate) {
    times.push_back(time);
    estimates.push_back(std::move(estimate));
}

double BornRecord::normalization_residual() const {
    double worst = 0.0;
    for (const auto& e : estimates) worst = std::max(worst, std::abs(pairwise_sum(e.values) - 1.0));
    return worst;
}

CollapseStatistics collapse_statistics(const Ensemble& ensemble, const SectorMap& sectors, double epsilon) {
    check_epsilon(epsilon, "collapse_statistics");
    require(ensemble.empty() || ensemble.dimension() == sectors.dimension(), "collapse_statistics",
            "dimension mismatch");
    const std::size_t s = sectors.sector_count();
    std::vector<std::vector<double>> collapsed(s);
    for (const Member& m : ensemble.members()) {
        for (std::size_t n = 0; n < s; ++n) {
            if (sector_weight(m.state, sectors, n) >= 1.0 - epsilon) {
                collapsed[n].push_back(m.weight);
                break;
            }
        }
    }
    CollapseStatistics out;
    for (const auto& w : collapsed) out.fractions.push_back(pairwise_sum(w));
    out.remainder = 1.0 - pairwise_sum(out.fractions);
    return out;
}

double PhaseHistogram::bin_width() const {
    return 2.0 * std::numbers::pi / static_cast<double>(mass.size());
}

double PhaseHistogram::total() const { return pairwise_sum(mass); }

PhaseHistogram phase_profile(const Ensemble& ensemble, const SectorMap& sectors, std::size_t sector,
                             double epsilon, std::size_t bins) {
    check_epsilon(epsilon, "phase_profile");
    require(bins >= 1, "phase_profile", "bin count must be positive");
    require(sector < sectors.sector_count(), "phase_profile", "unknown sector label " + std::to_string(sector));
    require(ensemble.empty() || ensemble.dimension() == sectors.dimension(), "phase_profile", "dimension mismatch");
    PhaseHistogram out;
    std::vector<std::vector<double>> per_bin(bins);
    const double width = 2.0 * std::numbers::pi / static_cast<double>(bins);
    for (const Member& m : ensemble.members()) {
        // Same membership rule as collapse_statistics: first sector over threshold.
        std::size_t owner = sectors.sector_count();
        for (std::size_t n = 0; n < sectors.sector_count(); ++n) {
            if (sector_weight(m.state, sectors, n) >= 1.0 - epsilon) {
                owner = n;
                break;
            }
        }
        if (owner != sector) continue;
        std::size_t dominant = sectors.members(sector).front();
        for (std::size_t i : sectors.members(sector))
            if (std::abs(m.state[i]) > std::abs(m.state[dominant])) dominant = i;
        double angle = std::arg(m.state[dominant]);
        if (angle < 0.0) angle += 2.0 * std::numbers::pi;
        auto bin = static_cast<std::size_t>(angle / width);
        if (bin >= bins) bin = bins - 1;
        per_bin[bin].push_back(m.weight);
        out.empty = false;
    }
    for (const auto& w : per_bin) out.mass.push_back(pairwise_sum(w));
    return out;
}

}  // namespace collapse
