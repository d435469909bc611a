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

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "collapse/hilbert.hpp"
#include "collapse/random.hpp"

namespace collapse::testing {

// Mean and standard error of a plain sample.
struct Moments {
    double mean = 0.0;
    double error = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
    long double sum = 0.0L;
    for (double v : x) sum += v;
    const long double mean = sum / static_cast<long double>(x.size());
    long double ss = 0.0L;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double variance = static_cast<double>(ss / static_cast<long double>(x.size() - 1));
    return {static_cast<double>(mean), std::sqrt(variance / static_cast<double>(x.size()))};
}

// Random nonnegative profile with at least one positive entry.
inline std::vector<double> random_profile(std::size_t length, RandomStream& rng) {
    std::vector<double> p(length);
    for (double& v : p) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    p[static_cast<std::size_t>(rng.uniform() * static_cast<double>(length))] = 0.5 + rng.uniform();
    return p;
}

// Random distribution over `bins` entries.
inline Eigen::VectorXd random_distribution(std::size_t bins, RandomStream& rng) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(bins));
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.exponential(1.0);
    return p / p.sum();
}

}  // namespace collapse::testing
