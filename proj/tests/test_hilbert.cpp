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
#include <complex>
#include <string>
#include <vector>

#include "collapse/error.hpp"
#include "collapse/hilbert.hpp"
#include "support.hpp"

using namespace collapse;
using collapse::testing::moments;

namespace {

Amplitudes amps(std::initializer_list<Complex> v) {
    Amplitudes a(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (Complex c : v) a[k++] = c;
    return a;
}

std::string precondition_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const PreconditionError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("normalize examples") {
    const StateVector a = normalize(amps({2.0, 0.0}));
    CHECK(a[0] == Complex(1.0, 0.0));
    CHECK(a[1] == Complex(0.0, 0.0));

    const StateVector b = normalize(amps({1.0, Complex(0.0, 1.0)}));
    CHECK(std::abs(b[0] - Complex(M_SQRT1_2, 0.0)) <= 1e-15);
    CHECK(std::abs(b[1] - Complex(0.0, M_SQRT1_2)) <= 1e-15);

    CHECK(precondition_message([] { normalize(amps({0.0, 0.0})); }).find("zero norm") != std::string::npos);
    const std::string bad = precondition_message([] { normalize(amps({1.0, Complex(NAN, 0.0), 2.0})); });
    CHECK(bad.find('1') != std::string::npos);
    CHECK_THROWS_AS(normalize(Amplitudes(0)), PreconditionError);
}

TEST_CASE("normalize keeps phases and unit norm") {
    RandomStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Amplitudes raw(5);
        for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = Complex(rng.normal(), rng.normal()) * 1e3;
        const StateVector psi = normalize(raw);
        CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) <= 1e-12);
        for (Eigen::Index i = 0; i < raw.size(); ++i)
            CHECK(std::abs(std::arg(psi[static_cast<std::size_t>(i)]) - std::arg(raw[i])) <= 1e-12);
    }
}

TEST_CASE("from_normalized rejects unnormalized input") {
    CHECK_THROWS_AS(StateVector::from_normalized(amps({1.0, 1.0})), NumericalError);
    CHECK_NOTHROW(StateVector::from_normalized(amps({0.6, 0.8})));
    CHECK(StateVector::basis(3, 2).probability(2) == 1.0);
    CHECK_THROWS_AS(StateVector::basis(3, 3), PreconditionError);
}

TEST_CASE("sample_uniform basic properties") {
    RandomStream rng(3);
    CHECK_THROWS_AS(sample_uniform(0, rng), PreconditionError);
    for (int k = 0; k < 20; ++k) CHECK(std::abs(sample_uniform(1, rng).probability(0) - 1.0) <= 1e-12);

    std::vector<double> p;
    for (int k = 0; k < 100000; ++k) p.push_back(sample_uniform(2, rng).probability(0));
    const auto m = moments(p);
    CHECK(std::abs(m.mean - 0.5) <= 3.0 * m.error);
}

TEST_CASE("sample_uniform d=3 marginal follows (1-x)^2 tail") {
    RandomStream rng(5);
    const int n = 100000;
    std::vector<int> counts(10, 0);
    for (int k = 0; k < n; ++k) {
        const double x = sample_uniform(3, rng).probability(0);
        counts[std::min(9, static_cast<int>(x * 10.0))]++;
    }
    for (int b = 0; b < 10; ++b) {
        const double lo = b / 10.0, hi = (b + 1) / 10.0;
        // P(x in [lo, hi)) from the tail function (1 - x)^2
        const double q = (1.0 - lo) * (1.0 - lo) - (1.0 - hi) * (1.0 - hi);
        const double sigma = std::sqrt(n * q * (1.0 - q));
        CHECK(std::abs(counts[b] - n * q) <= 3.0 * sigma);
    }
}

TEST_CASE("sample_uniform is basis covariant") {
    RandomStream rng(17);
    const double th = 0.7, ph = 1.3;
    Eigen::Matrix2cd u;
    u << std::cos(th), -std::sin(th) * std::polar(1.0, ph), std::sin(th), std::cos(th) * std::polar(1.0, ph);
    std::vector<double> p, p2, q, q2, cross;
    for (int k = 0; k < 100000; ++k) {
        const StateVector psi = sample_uniform(2, rng);
        const Eigen::Vector2cd r = u * psi.amplitudes();
        p.push_back(psi.probability(0));
        p2.push_back(psi.probability(0) * psi.probability(0));
        q.push_back(std::norm(r[0]));
        q2.push_back(std::norm(r[0]) * std::norm(r[0]));
        cross.push_back((r[0] * std::conj(r[1])).real());
    }
    for (const auto& [xs, expected] : {std::pair{&p, 0.5}, std::pair{&q, 0.5}, std::pair{&p2, 1.0 / 3.0},
                                       std::pair{&q2, 1.0 / 3.0}, std::pair{&cross, 0.0}}) {
        const auto m = moments(*xs);
        CHECK(std::abs(m.mean - expected) <= 3.0 * m.error);
    }
}

TEST_CASE("sector maps") {
    const std::vector<std::size_t> sizes{2, 2};
    const SectorMap blocks = SectorMap::blocks(sizes);
    CHECK(blocks.sector_count() == 2);
    CHECK(blocks.sector_of(3) == 1);
    CHECK(blocks.position_in_sector(3) == 1);
    CHECK(blocks.members(0).size() == 2);
    CHECK_THROWS_AS(SectorMap(std::vector<std::size_t>{0, 2}), PreconditionError);  // label 1 unused
    CHECK_THROWS_AS(SectorMap(std::vector<std::size_t>{}), PreconditionError);

    const StateVector uniform = normalize(amps({1.0, 1.0, 1.0, 1.0}));
    CHECK(std::abs(sector_weight(uniform, blocks, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(sector_weight(uniform, blocks, 1) - 0.5) <= 1e-15);
    CHECK_THROWS_AS(sector_weight(uniform, blocks, 2), PreconditionError);

    const StateVector psi = normalize(amps({std::sqrt(0.3), std::sqrt(0.7)}));
    CHECK(std::abs(sector_weight(psi, SectorMap::singletons(2), 0) - 0.3) <= 1e-15);
    CHECK(std::abs(sector_weight(psi, SectorMap(std::vector<std::size_t>{0, 0}), 0) - 1.0) <= 1e-15);
}

TEST_CASE("sector weights sum to one for random maps") {
    RandomStream rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const auto d = static_cast<std::size_t>(1 + rng.uniform() * 12);
        const auto s = static_cast<std::size_t>(1 + rng.uniform() * static_cast<double>(d));
        std::vector<std::size_t> labels(d);
        for (std::size_t i = 0; i < d; ++i) labels[i] = i < s ? i : static_cast<std::size_t>(rng.uniform() * s);
        const SectorMap map(labels);
        const StateVector psi = sample_uniform(d, rng);
        double total = 0.0;
        for (std::size_t n = 0; n < map.sector_count(); ++n) {
            const double w = sector_weight(psi, map, n);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0 + 1e-15);
            total += w;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("bilinear") {
    const StateVector psi = normalize(amps({1.0, Complex(0.0, 1.0)}));
    CHECK(std::abs(bilinear(psi, 0, 1) - Complex(0.0, -0.5)) <= 1e-15);
    CHECK_THROWS_AS(bilinear(psi, 0, 2), PreconditionError);
    RandomStream rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const StateVector r = sample_uniform(4, rng);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(bilinear(r, i, i).imag() == 0.0);
            CHECK(bilinear(r, i, i).real() >= 0.0);
            for (std::size_t j = 0; j < 4; ++j) CHECK(bilinear(r, i, j) == std::conj(bilinear(r, j, i)));
        }
    }
}

TEST_CASE("ensemble invariants") {
    const StateVector a = StateVector::basis(2, 0);
    const StateVector b = StateVector::basis(2, 1);
    CHECK_NOTHROW(Ensemble({{a, 0.25}, {b, 0.75}}, 1));
    CHECK_THROWS_AS(Ensemble({{a, 0.25}, {b, 0.7}}, 1), PreconditionError);
    CHECK_THROWS_AS(Ensemble({{a, 0.5}, {StateVector::basis(3, 0), 0.5}}, 1), PreconditionError);
    CHECK_THROWS_AS(Ensemble({{a, -0.5}, {b, 1.5}}, 1), PreconditionError);

    const Ensemble copies = Ensemble::replicate(a, 4, 9);
    CHECK(copies.size() == 4);
    CHECK(copies.seed() == 9);
    for (double w : copies.weights()) CHECK(w == 0.25);

    const Ensemble expanded = Ensemble::expand(Ensemble({{a, 0.25}, {b, 0.75}}, 1), 3, 5);
    REQUIRE(expanded.size() == 6);
    // contiguous blocks per decomposition member
    CHECK(expanded[2].state.probability(0) == 1.0);
    CHECK(expanded[3].state.probability(1) == 1.0);
    CHECK(std::abs(expanded[0].weight - 0.25 / 3.0) <= 1e-16);
    CHECK(std::abs(expanded[5].weight - 0.75 / 3.0) <= 1e-16);
}
