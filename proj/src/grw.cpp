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

#include "collapse/grw.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "collapse/density.hpp"
#include "collapse/error.hpp"
#include "collapse/stats.hpp"

namespace collapse {

void GrwGrid::validate() const {
    require(points >= 2, "GrwGrid", "at least two grid points are required");
    require(std::isfinite(spacing) && spacing > 0.0, "GrwGrid", "spacing must be > 0");
    require(std::isfinite(alpha) && alpha > 0.0, "GrwGrid", "alpha must be > 0");
    validate_rate(omega);
    const double resolution = spacing * std::sqrt(alpha);
    require(resolution <= 0.5, "GrwGrid",
            "spacing * sqrt(alpha) <= 0.5 violated (got " + std::to_string(resolution) + ")");
    const double extent = static_cast<double>(points) * resolution;
    require(extent >= 8.0, "GrwGrid",
            "points * spacing * sqrt(alpha) >= 8 violated (got " + std::to_string(extent) + ")");
}

long GrwGrid::ring_offset(std::size_t k0, std::size_t k1) const noexcept {
    const long n = static_cast<long>(points);
    long delta = (static_cast<long>(k1) - static_cast<long>(k0)) % n;
    if (delta < 0) delta += n;
    if (2 * delta > n) delta -= n;
    return delta;
}

JumpModel make_grw_model(const GrwGrid& grid) {
    grid.validate();
    const double prefactor = std::pow(2.0 * grid.alpha / std::numbers::pi, 0.25);
    std::vector<double> profile(grid.points);
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double x = static_cast<double>(grid.ring_offset(0, k)) * grid.spacing;
        profile[k] = prefactor * std::exp(-grid.alpha * x * x);
    }
    return make_bell_jump(grid.points, profile, grid.omega);
}

double analytic_offdiag_rate(double x, double x_prime, double alpha, double omega) {
    require(std::isfinite(alpha) && alpha > 0.0, "analytic_offdiag_rate", "alpha must be > 0");
    require(std::isfinite(omega) && omega > 0.0, "analytic_offdiag_rate", "omega must be > 0");
    const double gap = x_prime - x;
    return -omega * std::expm1(-alpha * gap * gap / 2.0);
}

StateVector gaussian_packet(const GrwGrid& grid, double center, double width) {
    grid.validate();
    require(std::isfinite(width) && width > 0.0, "gaussian_packet", "width must be > 0");
    Amplitudes a(static_cast<Eigen::Index>(grid.points));
    const double length = grid.length();
    for (std::size_t k = 0; k < grid.points; ++k) {
        double gap = std::fmod(std::abs(grid.position(k) - center), length);
        gap = std::min(gap, length - gap);
        a[static_cast<Eigen::Index>(k)] = std::exp(-gap * gap / (4.0 * width * width));
    }
    return normalize(a);
}

std::pair<std::size_t, std::size_t> centered_pair(const GrwGrid& grid, double center, double separation) {
    grid.validate();
    const double steps = separation / grid.spacing;
    const auto span = static_cast<long>(std::llround(steps));
    require(span >= 1 && std::abs(steps - static_cast<double>(span)) <= 1e-9, "centered_pair",
            "separation must be a positive multiple of the spacing");
    const long n = static_cast<long>(grid.points);
    long first = std::lround(center / grid.spacing - static_cast<double>(span) / 2.0);
    first = ((first % n) + n) % n;
    const long second = (first + span) % n;
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(second)};
}

namespace {

void fit_decay(PairFit& fit, std::span<const double> times) {
    const std::size_t last = times.size() - 1;
    fit.fittable = fit.magnitude[last] >= 10.0 * fit.noise[last] && fit.magnitude[last] > 0.0;
    if (!fit.fittable) return;
    std::vector<double> t, y, s;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (fit.magnitude[k] <= 0.0 || fit.magnitude[k] < 10.0 * fit.noise[k]) continue;
        t.push_back(times[k]);
        y.push_back(std::log(fit.magnitude[k]));
        s.push_back(fit.noise[k] / fit.magnitude[k]);
    }
    fit.points_used = t.size();
    if (t.size() < 2) {
        fit.fittable = false;
        return;
    }
    const double n = static_cast<double>(t.size());
    const double t_mean = pairwise_sum(t) / n;
    const double y_mean = pairwise_sum(y) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        sxx += (t[k] - t_mean) * (t[k] - t_mean);
        sxy += (t[k] - t_mean) * (y[k] - y_mean);
    }
    if (sxx <= 0.0) {
        fit.fittable = false;
        return;
    }
    fit.fitted_rate = -sxy / sxx;
    double variance = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double c = (t[k] - t_mean) / sxx;
        variance += c * c * s[k] * s[k];
    }
    fit.rate_error = std::sqrt(variance);
}

}  // namespace

LocalizationReport measure_localization(const StateVector& initial, const GrwGrid& grid,
                                        std::span<const double> times,
                                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                        const LocalizationOptions& options) {
    const JumpModel model = make_grw_model(grid);
    require(initial.dimension() == grid.points, "measure_localization", "state does not live on the grid");
    require(!times.empty(), "measure_localization", "at least one time is required");
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(std::isfinite(times[k]) && times[k] >= 0.0, "measure_localization", "times must be >= 0");
        if (k > 0) require(times[k] > times[k - 1], "measure_localization", "times must be strictly increasing");
    }
    require(options.trajectories >= 2, "measure_localization", "at least two trajectories are required");
    const std::size_t bins = options.histogram_bins;
    require(bins >= 1 && grid.points % bins == 0, "measure_localization",
            "histogram bin count must divide the number of grid points");
    for (const auto& [i, j] : pairs)
        require(i < grid.points && j < grid.points && i != j, "measure_localization", "invalid position pair");

    LocalizationReport report;
    report.times.assign(times.begin(), times.end());
    const std::size_t per_bin = grid.points / bins;
    report.initial_histogram.assign(bins, 0.0);
    for (std::size_t x = 0; x < grid.points; ++x) report.initial_histogram[x / per_bin] += initial.probability(x);

    for (const auto& [i, j] : pairs) {
        PairFit fit;
        fit.first = i;
        fit.second = j;
        fit.separation = std::abs(static_cast<double>(grid.ring_offset(i, j))) * grid.spacing;
        fit.analytic_rate = analytic_offdiag_rate(0.0, fit.separation, grid.alpha, grid.omega);
        report.pairs.push_back(std::move(fit));
    }

    Ensemble ensemble = Ensemble::replicate(initial, options.trajectories, options.seed);
    const std::size_t n = ensemble.size();
    const auto weights = ensemble.weights();
    std::vector<double> re(n), im(n), scratch(n);
    double now = 0.0;
    for (double t : times) {
        if (t > now) {
            ensemble = evolve_ensemble(ensemble, model, t - now, options.workers);
            now = t;
        }
        for (PairFit& fit : report.pairs) {
            for (std::size_t k = 0; k < n; ++k) {
                const Complex v = bilinear(ensemble[k].state, fit.first, fit.second);
                re[k] = v.real();
                im[k] = v.imag();
            }
            const Estimate er = weighted_mean(re, weights);
            const Estimate ei = weighted_mean(im, weights);
            fit.magnitude.push_back(std::hypot(er.value, ei.value));
            fit.noise.push_back(std::hypot(er.error, ei.error));
        }

        std::vector<double> h(bins), herr(bins);
        double worst_z = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            for (std::size_t k = 0; k < n; ++k) {
                double mass = 0.0;
                for (std::size_t x = b * per_bin; x < (b + 1) * per_bin; ++x) mass += ensemble[k].state.probability(x);
                scratch[k] = mass;
            }
            const Estimate e = weighted_mean(scratch, weights);
            h[b] = e.value;
            herr[b] = e.error;
            const double drift = std::abs(e.value - report.initial_histogram[b]);
            worst_z = std::max(worst_z, band_z(drift, e.error));
            if (drift > 3.0 * e.error + kBandFloor) report.histogram_stable = false;
        }
        report.histogram.push_back(std::move(h));
        report.histogram_error.push_back(std::move(herr));
        report.histogram_max_z.push_back(worst_z);

        for (std::size_t x = 0; x < grid.points; ++x) {
            double mean = 0.0;
            for (std::size_t k = 0; k < n; ++k) mean += weights[k] * ensemble[k].state.probability(x);
            report.max_diagonal_drift = std::max(report.max_diagonal_drift, std::abs(mean - initial.probability(x)));
        }

        for (std::size_t k = 0; k < n; ++k) scratch[k] = ensemble[k].state.amplitudes().cwiseAbs2().squaredNorm();
        const Estimate ipr = weighted_mean(scratch, weights);
        report.ipr_mean.push_back(ipr.value);
        report.ipr_error.push_back(ipr.error);
    }

    for (PairFit& fit : report.pairs) fit_decay(fit, times);
    return report;
}

}  // namespace collapse
