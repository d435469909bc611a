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

#include "collapse/stats.hpp"

#include <cmath>
#include <vector>

#include "collapse/error.hpp"

namespace collapse {

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 32;
    if (values.size() <= kLeaf) {
        double total = 0.0;
        for (double v : values) total += v;
        return total;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate weighted_mean(std::span<const double> values, std::span<const double> weights,
                       std::size_t stratum_size) {
    require(values.size() == weights.size(), "weighted_mean", "values/weights size mismatch");
    require(!values.empty(), "weighted_mean", "empty sample");
    const std::size_t n = values.size();
    if (stratum_size == 0) stratum_size = n;
    require(n % stratum_size == 0, "weighted_mean", "sample size is not a multiple of the stratum size");

    std::vector<double> terms(n);
    for (std::size_t k = 0; k < n; ++k) terms[k] = weights[k] * values[k];
    const double mean = pairwise_sum(terms);

    double variance = 0.0;
    for (std::size_t begin = 0; begin < n; begin += stratum_size) {
        if (stratum_size < 2) break;
        const auto w = weights.subspan(begin, stratum_size);
        const auto x = values.subspan(begin, stratum_size);
        const double mass = pairwise_sum(w);
        if (mass <= 0.0) continue;
        double local = 0.0;
        for (std::size_t k = 0; k < stratum_size; ++k) local += w[k] * x[k];
        local /= mass;
        double spread = 0.0;
        for (std::size_t k = 0; k < stratum_size; ++k) {
            const double dev = x[k] - local;
            spread += w[k] * w[k] * dev * dev;
        }
        variance += spread * static_cast<double>(stratum_size) / static_cast<double>(stratum_size - 1);
    }
    return {mean, std::sqrt(variance)};
}

}  // namespace collapse
