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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "collapse/density.hpp"
#include "collapse/error.hpp"
#include "collapse/grw.hpp"

using namespace collapse;

namespace {

std::string failure(const GrwGrid& grid) {
    try {
        grid.validate();
    } catch (const PreconditionError& e) {
        return e.what();
    }
    return "";
}

double smallest_offdiag_rate(const JumpModel& m) {
    const Eigen::MatrixXd r = -lift_generator(m).rates();
    double smallest = INFINITY;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            if (i != j) smallest = std::min(smallest, r(i, j));
    return smallest;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK(failure(GrwGrid{}).empty());
    CHECK(failure(GrwGrid{128, 0.6, 1.0, 1.0}).find("spacing * sqrt(alpha) <= 0.5") != std::string::npos);
    CHECK(failure(GrwGrid{16, 0.25, 1.0, 1.0}).find("points * spacing * sqrt(alpha) >= 8") != std::string::npos);
    CHECK(failure(GrwGrid{128, 0.25, 1.0, -1.0}).find("JumpModel.rate") != std::string::npos);
    CHECK(failure(GrwGrid{128, 0.25, 0.0, 1.0}).find("alpha") != std::string::npos);

    const GrwGrid g{10, 0.5, 1.0, 1.0};
    CHECK(g.ring_offset(1, 3) == 2);
    CHECK(g.ring_offset(9, 0) == 1);
    CHECK(g.ring_offset(0, 9) == -1);
}

TEST_CASE("jump profile and overlap") {
    for (double alpha : {0.25, 1.0, 4.0}) {
        const GrwGrid grid{400, 0.1 / std::sqrt(alpha), alpha, 1.0};
        const JumpModel m = make_grw_model(grid);
        CHECK(std::abs(m.squared_weights().col(0).sum() - 1.0) <= 1e-12);
        const Eigen::MatrixXd& overlap = m.overlap();
        for (std::size_t k = 0; k < grid.points; ++k) {
            const double gap = static_cast<double>(std::abs(grid.ring_offset(0, k))) * grid.spacing;
            if (gap * std::sqrt(alpha) > 4.0) continue;
            CHECK(std::abs(overlap(0, static_cast<Eigen::Index>(k)) - std::exp(-alpha * gap * gap / 2.0)) <= 1e-6);
        }
    }
}

TEST_CASE("analytic off-diagonal rate") {
    CHECK(analytic_offdiag_rate(1.5, 1.5, 1.0, 2.0) == 0.0);
    CHECK(std::abs(analytic_offdiag_rate(0.0, 1.0, 1.0, 1.0) - 0.3934693402873666) <= 1e-15);
    CHECK(std::abs(analytic_offdiag_rate(0.0, 100.0, 1.0, 3.0) - 3.0) <= 1e-15);
    CHECK(analytic_offdiag_rate(0.0, 1.0, 1.0, 1.0) < analytic_offdiag_rate(0.0, 2.0, 1.0, 1.0));
    CHECK_THROWS_AS(analytic_offdiag_rate(0.0, 1.0, -1.0, 1.0), PreconditionError);
}

TEST_CASE("lifted rates match the analytic rate and vanish on the diagonal") {
    const GrwGrid grid{256, 0.05, 1.0, 1.5};
    const LiftedGenerator lifted = lift_generator(make_grw_model(grid));
    for (std::size_t k = 0; k < grid.points; ++k) CHECK(lifted.rates()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) == 0.0);
    for (std::size_t k = 1; k <= 80; ++k) {
        const double expected = analytic_offdiag_rate(0.0, grid.position(k), grid.alpha, grid.omega);
        CHECK(std::abs(-lifted.rates()(0, static_cast<Eigen::Index>(k)) - expected) <= 1.5e-6);
    }
}

TEST_CASE("no spectral gap in the continuum limit") {
    double previous = INFINITY;
    for (double spacing : {0.4, 0.2, 0.1, 0.05}) {
        const GrwGrid grid{static_cast<std::size_t>(std::lround(16.0 / spacing)), spacing, 1.0, 1.0};
        const double smallest = smallest_offdiag_rate(make_grw_model(grid));
        CHECK(smallest > 0.0);
        CHECK(smallest < previous / 3.0);
        previous = smallest;
    }
}

TEST_CASE("gaussian packet and centered pairs") {
    const GrwGrid grid{128, 0.25, 1.0, 1.0};
    const StateVector psi = gaussian_packet(grid, 16.0, 2.0);
    double mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < grid.points; ++k) {
        mean += psi.probability(k) * grid.position(k);
        second += psi.probability(k) * grid.position(k) * grid.position(k);
    }
    CHECK(std::abs(mean - 16.0) <= 1e-9);
    CHECK(std::abs(std::sqrt(second - mean * mean) - 2.0) <= 1e-6);

    const auto pair = centered_pair(grid, 16.0, 1.0);
    CHECK(pair.second - pair.first == 4);
    CHECK(std::abs(0.5 * (grid.position(pair.first) + grid.position(pair.second)) - 16.0) <= 0.125);
    CHECK_THROWS_AS(centered_pair(grid, 16.0, 0.3), PreconditionError);
    CHECK_THROWS_AS(gaussian_packet(grid, 16.0, 0.0), PreconditionError);
}

TEST_CASE("localization") {
    const GrwGrid grid{64, 0.25, 1.0, 1.0};
    const StateVector psi = gaussian_packet(grid, 8.0, 2.0);
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(0.5 * k);
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{centered_pair(grid, 8.0, 1.0),
                                                                  centered_pair(grid, 8.0, 4.0)};

    const LocalizationReport report = measure_localization(psi, grid, times, pairs, {2000, 9, 2, 8});
    REQUIRE(report.pairs.size() == 2);
    const PairFit& near = report.pairs[0];
    CHECK(near.fittable);
    CHECK(std::abs(near.analytic_rate - 0.3934693402873666) <= 1e-15);
    CHECK(std::abs(near.fitted_rate - near.analytic_rate) <= 4.0 * near.rate_error);
    CHECK(report.ipr_error.front() <= 1e-15);
    CHECK(report.ipr_mean.back() - report.ipr_mean.front() > 3.0 * report.ipr_error.back());

    // Short horizon: at late times the tail bins hold only a handful of
    // localized trajectories and their sample errors are not reliable.
    const std::vector<double> early{0.0, 0.5, 1.0, 1.5, 2.0};
    const LocalizationReport stable = measure_localization(psi, grid, early, pairs, {2000, 10, 2, 4});
    CHECK(stable.histogram_stable);
    CHECK(stable.max_diagonal_drift < 0.01);

    const LocalizationReport sparse = measure_localization(psi, grid, times, pairs, {200, 9, 1, 8});
    CHECK_FALSE(sparse.pairs[1].fittable);

    CHECK_THROWS_AS(measure_localization(psi, grid, std::vector<double>{1.0, 0.5}, pairs, {}),
                    PreconditionError);
    CHECK_THROWS_AS(measure_localization(psi, grid, times, pairs, {1, 9, 1, 8}), PreconditionError);
    CHECK_THROWS_AS(measure_localization(psi, grid, times, pairs, {100, 9, 1, 7}), PreconditionError);
}
