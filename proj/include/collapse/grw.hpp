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
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "collapse/jump.hpp"

namespace collapse {

/// Periodic position grid for the single-particle localization model.
struct GrwGrid {
    std::size_t points = 128;
    double spacing = 0.25;  // length
    double alpha = 1.0;     // 1 / length^2
    double omega = 1.0;     // 1 / time

    /// Throws PreconditionError("GrwGrid") naming the violated inequality:
    /// spacing * sqrt(alpha) <= 0.5 and points * spacing * sqrt(alpha) >= 8.
    void validate() const;
    double length() const noexcept { return static_cast<double>(points) * spacing; }
    double position(std::size_t k) const noexcept { return static_cast<double>(k) * spacing; }
    /// Shortest signed offset (k1 - k0) on the ring, in grid steps.
    long ring_offset(std::size_t k0, std::size_t k1) const noexcept;
};

/// Bell's jump on the grid: j(x) = (2 alpha / pi)^{1/4} exp(-alpha x^2) at the
/// ring offsets, rescaled so that sum_xi j^2 = 1; rate omega.
JumpModel make_grw_model(const GrwGrid& grid);

/// omega (1 - exp(-alpha (x' - x)^2 / 2)).
double analytic_offdiag_rate(double x, double x_prime, double alpha, double omega);

/// psi(x) proportional to exp(-(x - center)^2 / (4 width^2)) with ring
/// distances, so |psi|^2 has standard deviation `width`.
StateVector gaussian_packet(const GrwGrid& grid, double center, double width);

/// Grid pair (i, j) straddling `center` with j - i = separation / spacing.
std::pair<std::size_t, std::size_t> centered_pair(const GrwGrid& grid, double center, double separation);

struct PairFit {
    std::size_t first = 0;
    std::size_t second = 0;
    double separation = 0.0;
    std::vector<double> magnitude;  // |rho(x, x')| at each time
    std::vector<double> noise;      // its standard error
    bool fittable = false;
    std::size_t points_used = 0;
    double fitted_rate = 0.0;
    double rate_error = 0.0;
    double analytic_rate = 0.0;
};

struct LocalizationOptions {
    std::size_t trajectories = 20000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    /// Contiguous position bins for the diagonal time-invariance check.
    std::size_t histogram_bins = 8;
};

struct LocalizationReport {
    std::vector<double> times;
    std::vector<PairFit> pairs;

    /// Coarse position histogram (diagonal of rho) per time, its standard
    /// errors, and the exact initial histogram.
    std::vector<std::vector<double>> histogram;
    std::vector<std::vector<double>> histogram_error;
    std::vector<double> initial_histogram;
    /// Per time: max over bins of |H(t) - H(0)| / sigma.
    std::vector<double> histogram_max_z;
    /// Every bin at every time within 3 sigma (+ kBandFloor).
    bool histogram_stable = true;
    /// max over positions and times of |rho_xx(t) - rho_xx(0)|.
    double max_diagonal_drift = 0.0;

    /// Mean inverse participation ratio sum |psi|^4 and its standard error.
    std::vector<double> ipr_mean;
    std::vector<double> ipr_error;
};

/// Evolves N copies of psi0 and fits the off-diagonal decay of rho for each
/// pair by log-linear least squares over the times where |rho| >= 10 sigma.
/// A pair whose last sample is below 10 sigma is reported unfittable.
LocalizationReport measure_localization(const StateVector& initial, const GrwGrid& grid,
                                        std::span<const double> times,
                                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                        const LocalizationOptions& options);

}  // namespace collapse
