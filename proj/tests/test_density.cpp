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
#include <vector>

#include "collapse/density.hpp"
#include "collapse/error.hpp"
#include "collapse/jump.hpp"
#include "support.hpp"

using namespace collapse;
using collapse::testing::random_profile;

namespace {

StateVector qubit(double a0, double a1) {
    Amplitudes a(2);
    a << Complex(a0), Complex(a1);
    return normalize(a);
}

JumpModel soft_qubit(double c2 = 0.9, double rate = 1.0) {
    return make_bell_jump(2, std::vector<double>{std::sqrt(c2), std::sqrt(1.0 - c2)}, rate);
}

Ensemble mixture(std::vector<Member> members) { return Ensemble(std::move(members), 1); }

}  // namespace

TEST_CASE("DensityMatrix validation") {
    Eigen::Matrix2cd ok;
    ok << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.5;
    CHECK_NOTHROW(DensityMatrix{Eigen::MatrixXcd(ok)});
    Eigen::Matrix2cd skew = ok;
    skew(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix{Eigen::MatrixXcd(skew)}, PreconditionError);
    CHECK_THROWS_AS(DensityMatrix{Eigen::MatrixXcd(2.0 * ok)}, PreconditionError);
    Eigen::Matrix2cd negative;
    negative << 1.2, 0.0, 0.0, -0.2;
    CHECK_THROWS_AS(DensityMatrix{Eigen::MatrixXcd(negative)}, PreconditionError);
}

TEST_CASE("ensemble_density") {
    RandomStream rng(1);
    const StateVector psi = sample_uniform(4, rng);
    const DensityMatrix pure = ensemble_density(Ensemble::replicate(psi, 3, 1));
    const Eigen::MatrixXcd projector = psi.amplitudes() * psi.amplitudes().adjoint();
    CHECK((pure.entries() - projector).cwiseAbs().maxCoeff() <= 1e-15);

    std::vector<Member> basis;
    for (std::size_t i = 0; i < 4; ++i) basis.push_back({StateVector::basis(4, i), 0.25});
    CHECK((ensemble_density(mixture(basis)).entries() - Eigen::MatrixXcd::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(ensemble_density(Ensemble()), PreconditionError);

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Member> members;
        for (int k = 0; k < 8; ++k) members.push_back({sample_uniform(5, rng), 0.125});
        const DensityMatrix rho = ensemble_density(mixture(members));
        CHECK(std::abs(rho.entries().trace() - 1.0) <= 1e-12);
        CHECK((rho.entries() - rho.entries().adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(rho.min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("lift_generator") {
    const LiftedGenerator one_hot = lift_generator(make_bell_jump(3, std::vector<double>{1.0}, 2.0));
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(one_hot.rates()(i, j) == (i == j ? 0.0 : -2.0));

    RandomStream rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform() * 8);
        const JumpModel m = make_bell_jump(d, random_profile(d, rng), 0.5 + rng.uniform());
        CHECK(lift_generator(m).rates().diagonal().isZero(0.0));
        for (int k = 0; k < 100; ++k) CHECK(lift_residual(m, sample_uniform(d, rng)) <= 1e-12);
    }
}

TEST_CASE("evolve_density") {
    const LiftedGenerator soft = lift_generator(soft_qubit());
    CHECK(std::abs(soft.rates()(0, 1) + 0.4) <= 1e-15);

    const DensityMatrix rho0 = DensityMatrix::pure(qubit(1.0, 1.0));
    const DensityMatrix late = evolve_density(soft, rho0, INFINITY);
    CHECK(late(0, 1) == Complex(0.0, 0.0));
    CHECK(late(0, 0) == rho0(0, 0));
    CHECK(std::abs(evolve_density(soft, rho0, 2.5)(0, 1) - 0.5 * std::exp(-1.0)) <= 1e-15);
    CHECK_THROWS_AS(evolve_density(soft, rho0, -1.0), PreconditionError);

    Eigen::Matrix2cd diagonal;
    diagonal << 0.7, 0.0, 0.0, 0.3;
    const DensityMatrix diag(diagonal);
    CHECK(evolve_density(soft, diag, 3.0).entries() == diag.entries());

    RandomStream rng(3);
    const JumpModel m = make_bell_jump(6, random_profile(4, rng), 1.0);
    const LiftedGenerator lifted = lift_generator(m);
    std::vector<Member> members;
    for (int k = 0; k < 3; ++k) members.push_back({sample_uniform(6, rng), 1.0 / 3.0});
    const DensityMatrix r = ensemble_density(mixture(members));
    for (double t : {0.1, 0.5, 2.0, 10.0}) {
        const DensityMatrix once = evolve_density(lifted, r, 2.0 * t);
        const DensityMatrix twice = evolve_density(lifted, evolve_density(lifted, r, t), t);
        CHECK((once.entries() - twice.entries()).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(once.min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("compare_mc_density") {
    const JumpModel projective = make_bell_jump(2, std::vector<double>{1.0, 0.0}, 1.0);
    // sqrt(0.1) sqrt(0.9) = 0.3
    const Ensemble single = mixture({{qubit(std::sqrt(0.1), std::sqrt(0.9)), 1.0}});
    const std::vector<double> times{0.0, 2.0};
    const auto result = compare_mc_density(projective, single, times, {20000, 5, 2});
    CHECK(result[0].max_deviation <= 1e-12);
    const Complex mc = result[1].monte_carlo(0, 1);
    CHECK(std::abs(result[1].analytic(0, 1) - 0.3 * std::exp(-2.0)) <= 1e-15);
    CHECK(std::abs(std::abs(mc) - 0.3 * std::exp(-2.0)) <= 3.0 * result[1].error(0, 1));
    CHECK(result[1].within_band);
    CHECK_THROWS_AS(compare_mc_density(projective, single, times, {0, 5, 1}), PreconditionError);
}

TEST_CASE("lift and ensemble evolution commute") {
    RandomStream rng(4);
    const JumpModel m = make_bell_jump(3, random_profile(3, rng), 1.0);
    const Ensemble decomposition = mixture({{sample_uniform(3, rng), 0.5}, {sample_uniform(3, rng), 0.5}});
    const std::vector<double> times{0.0, 0.5, 1.5};
    for (const DensityComparison& c : compare_mc_density(m, decomposition, times, {10000, 6, 1}))
        CHECK(c.within_band);
}

TEST_CASE("Monte Carlo deviations shrink like 1/sqrt(N)") {
    const JumpModel m = soft_qubit();
    const Ensemble start = mixture({{qubit(1.0, 1.0), 1.0}});
    const std::vector<double> times{1.0};
    double small = 0.0, large = 0.0;
    const int seeds = 24;
    for (int s = 0; s < seeds; ++s) {
        const auto a = compare_mc_density(m, start, times, {1000, static_cast<std::uint64_t>(100 + s), 1});
        const auto b = compare_mc_density(m, start, times, {4000, static_cast<std::uint64_t>(500 + s), 1});
        small += std::norm(a[0].monte_carlo(0, 1) - a[0].analytic(0, 1));
        large += std::norm(b[0].monte_carlo(0, 1) - b[0].analytic(0, 1));
    }
    const double ratio = std::sqrt(small / large);
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 3.0);
}

TEST_CASE("Gisin decompositions are indistinguishable") {
    const JumpModel m = soft_qubit();
    const double c = std::sqrt(0.75), s = std::sqrt(0.25);
    const Ensemble a = mixture({{StateVector::basis(2, 0), 0.75}, {StateVector::basis(2, 1), 0.25}});
    const Ensemble b = mixture({{qubit(c, s), 0.5}, {qubit(c, -s), 0.5}});
    const std::vector<double> times{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};

    const DistanceReport same = gisin_experiment(a, a, m, times, {5000, 1, 1});
    CHECK(same.indistinguishable);
    const DistanceReport report = gisin_experiment(a, b, m, times, {20000, 2, 4});
    CHECK(report.indistinguishable);
    CHECK(report.points.size() == times.size());

    const Ensemble other = mixture({{qubit(1.0, 1.0), 1.0}});
    CHECK_THROWS_AS(gisin_experiment(a, other, m, times, {100, 1, 1}), PreconditionError);

    // off-diagonal 0.4 against 0
    const double w = 0.4 / (c * s);
    const Ensemble control = mixture({{qubit(c, s), w}, {StateVector::basis(2, 0), 1.0 - w}});
    CHECK(std::abs(ensemble_density(control)(0, 1) - 0.4) <= 1e-15);
    const std::vector<double> start{0.0};
    const DistanceReport negative = ensemble_distance(a, control, m, start, {20000, 3, 1});
    CHECK_FALSE(negative.points[0].within_band);
    CHECK(negative.points[0].distance(0, 1) >= 0.4 - 1e-12);
}
