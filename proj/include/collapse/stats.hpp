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
#include <span>

namespace collapse {

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// A weighted Monte Carlo mean with its standard error.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Weighted mean of `values` and its standard error.
///
/// Members are grouped into consecutive strata of `stratum_size` (0 means a
/// single stratum). The variance is the sum over strata of
/// n/(n-1) * sum w^2 (x - mean_stratum)^2, which is the usual estimator for a
/// stratified sample with independent draws inside each stratum.
Estimate weighted_mean(std::span<const double> values, std::span<const double> weights,
                       std::size_t stratum_size = 0);

}  // namespace collapse
