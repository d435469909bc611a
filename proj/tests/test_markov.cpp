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

#include <unsupported/Eigen/MatrixFunctions>

#include "collapse/error.hpp"
#include "collapse/expm.hpp"
#include "collapse/jump.hpp"
#include "collapse/markov.hpp"
#include "support.hpp"

using namespace collapse;
using collapse::testing::random_distribution;

namespace {

JumpChain bell_chain(double c2, double rate = 1.0) {
    const std::vector<double> profile{std::sqrt(c2), std::sqrt(1.0 - c2)};
    return reduce_qubit_model(make_bell_jump(2, profile, rate));
}

JumpChain projective_chain(double rate = 1.0) { return bell_chain(1.0, rate); }

Eigen::VectorXd nodes_vector(std::size_t bins) {
    const auto nodes = bin_nodes(bins);
    return Eigen::Map<const Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
}

}  // namespace

TEST_CASE("reduce_qubit_model") {
    CHECK_THROWS_AS(reduce_qubit_model(make_bell_jump(3, std::vector<double>{1.0}, 1.0)), PreconditionError);

    const JumpChain projective = projective_chain();
    const auto b = projective.branches(0.3);
    CHECK(std::abs(b[0].probability - 0.3) <= 1e-15);
    CHECK(b[0].target == 1.0);
    CHECK(std::abs(b[1].probability - 0.7) <= 1e-15);
    CHECK(b[1].target == 0.0);

    const JumpChain frozen = bell_chain(0.5);
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (const Branch& br : frozen.branches(p)) CHECK(std::abs(br.target - p) <= 1e-15);
}

TEST_CASE("branch probabilities and martingale on a fine grid") {
    RandomStream rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = rng.uniform(), c = rng.uniform();
        Eigen::Matrix2d w2;
        w2 << a, c, 1.0 - a, 1.0 - c;
        const JumpChain chain(w2, 1.0);
        for (int k = 0; k <= 1000; ++k) {
            const double p = k / 1000.0;
            const auto br = chain.branches(p);
            CHECK(std::abs(br[0].probability + br[1].probability - 1.0) <= 1e-12);
            CHECK(std::abs(br[0].probability * br[0].target + br[1].probability * br[1].target - p) <= 1e-12);
        }
    }
}

TEST_CASE("bin nodes include both endpoints") {
    const auto nodes = bin_nodes(5);
    CHECK(nodes == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const auto edges = bin_edges(5);
    REQUIRE(edges.size() == 6);
    CHECK(edges.front() == 0.0);
    CHECK(edges.back() == 1.0);
}

TEST_CASE("build_generator structure") {
    CHECK_THROWS_AS(build_generator(projective_chain(), 2), PreconditionError);
    RandomStream rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = rng.uniform(), c = rng.uniform();
        Eigen::Matrix2d w2;
        w2 << a, c, 1.0 - a, 1.0 - c;
        const GeneratorMatrix k = build_generator(JumpChain(w2, 0.5 + rng.uniform()), 101);
        CHECK(k.column_sum_residual() <= 1e-12);
        const Eigen::VectorXd p = nodes_vector(101);
        CHECK((k.entries().transpose() * p).cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index i = 0; i < 101; ++i)
            for (Eigen::Index j = 0; j < 101; ++j) {
                if (i == j)
                    CHECK(k.entries()(i, j) <= 0.0);
                else
                    CHECK(k.entries()(i, j) >= 0.0);
            }
    }

    // projective: interior mass goes to the boundary bins with weights (1-p, p)
    const GeneratorMatrix k = build_generator(projective_chain(2.0), 11);
    const auto nodes = bin_nodes(11);
    for (Eigen::Index j = 1; j < 10; ++j) {
        CHECK(std::abs(k.entries()(10, j) - 2.0 * nodes[static_cast<std::size_t>(j)]) <= 1e-15);
        CHECK(std::abs(k.entries()(0, j) - 2.0 * (1.0 - nodes[static_cast<std::size_t>(j)])) <= 1e-15);
        CHECK(std::abs(k.entries()(j, j) + 2.0) <= 1e-15);
    }
    CHECK(k.entries().col(0).isZero(0.0));
    CHECK(k.entries().col(10).isZero(0.0));
}

TEST_CASE("matrix_exponential matches an independent implementation") {
    RandomStream rng(3);
    for (double norm : {1e-6, 0.1, 1.0, 5.0, 30.0}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform() * 20);
            Eigen::MatrixXd a(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
            a *= norm / a.cwiseAbs().colwise().sum().maxCoeff();
            const Eigen::MatrixXd ours = matrix_exponential(a);
            const Eigen::MatrixXd theirs = a.exp();
            CHECK((ours - theirs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, theirs.cwiseAbs().maxCoeff()));
        }
    }
    CHECK(matrix_exponential(Eigen::MatrixXd::Zero(3, 3)).isIdentity(0.0));
}

TEST_CASE("projective spectrum and zero modes") {
    const GeneratorMatrix k = build_generator(projective_chain(1.5), 101);
    const SpectralData s = spectral_decompose(k);
    int zero = 0, gap = 0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        if (std::abs(s.eigenvalues[i]) <= 1e-8) ++zero;
        if (std::abs(s.eigenvalues[i] + 1.5) <= 1e-8) ++gap;
    }
    CHECK(zero == 2);
    CHECK(gap == 99);
    CHECK(s.zero_mode_indices().size() == 2);

    // zero-mode left vectors span {p, 1-p}
    const ZeroModes z = zero_modes(s);
    const Eigen::VectorXd p = nodes_vector(101);
    Eigen::MatrixXd basis(101, 2);
    basis.col(0) = p;
    basis.col(1) = Eigen::VectorXd::Ones(101) - p;
    for (Eigen::Index m = 0; m < 2; ++m) {
        const Eigen::VectorXd g = z.left.row(m).transpose();
        const Eigen::VectorXd fit = basis * basis.colPivHouseholderQr().solve(g);
        CHECK((fit - g).cwiseAbs().maxCoeff() <= 2.0 / 101.0);
    }
}

TEST_CASE("spectral decomposition of random Bell chains") {
    RandomStream rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const GeneratorMatrix k = build_generator(bell_chain(rng.uniform(), 0.5 + rng.uniform()), 101);
        const SpectralData s = spectral_decompose(k);
        CHECK(s.biorthogonality_residual() <= 1e-8);
        CHECK(s.completeness_residual() <= 1e-8);
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
            CHECK(s.eigenvalues[i].real() <= 1e-10);
            double nearest = INFINITY;
            for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j)
                nearest = std::min(nearest, std::abs(s.eigenvalues[j] - std::conj(s.eigenvalues[i])));
            CHECK(nearest <= 1e-8);
        }
        for (double t : {0.1, 1.0, 10.0}) {
            const Eigen::MatrixXd exact = matrix_exponential(k.entries() * t);
            CHECK((s.propagator(t) - exact.cast<Complex>()).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("defective generators are reported") {
    Eigen::MatrixXd jordan(3, 3);
    jordan << -1, 0, 0, 1, -1, 0, 0, 1, 0;
    CHECK_THROWS_AS(spectral_decompose(GeneratorMatrix(jordan, 1.0)), DefectiveSpectrumError);
    try {
        spectral_decompose(GeneratorMatrix(jordan, 1.0));
    } catch (const DefectiveSpectrumError& e) {
        CHECK(std::string(e.what()).find("merged eigenvalues") != std::string::npos);
    }
}

TEST_CASE("propagate") {
    const GeneratorMatrix k = build_generator(bell_chain(0.8), 51);
    RandomStream rng(5);
    const Eigen::VectorXd p0 = random_distribution(51, rng);
    CHECK(propagate(k, p0, 0.0) == p0);
    CHECK_THROWS_AS(propagate(k, p0, -1.0), PreconditionError);
    CHECK_THROWS_AS(propagate(k, 2.0 * p0, 1.0), PreconditionError);
    CHECK_THROWS_AS(propagate(k, Eigen::VectorXd::Ones(3) / 3.0, 1.0), PreconditionError);

    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd q = random_distribution(51, rng);
        const double t1 = 3.0 * rng.uniform(), t2 = 3.0 * rng.uniform();
        const Eigen::VectorXd direct = propagate(k, q, t1 + t2);
        Eigen::VectorXd mid = propagate(k, q, t1);
        mid /= mid.sum();  // the precondition wants exact unit mass; the drift is < 1e-14
        CHECK((propagate(k, mid, t2) - direct).cwiseAbs().maxCoeff() <= 1e-10);
        const Eigen::VectorXd late = propagate(k, q, 5.0);
        CHECK(std::abs(late.sum() - 1.0) <= 1e-10);
        CHECK(late.minCoeff() >= -1e-12);
    }
}

TEST_CASE("limit_distribution") {
    const GeneratorMatrix k = build_generator(projective_chain(), 11);
    const SpectralData s = spectral_decompose(k);
    Eigen::VectorXd point = Eigen::VectorXd::Zero(11);
    point[3] = 1.0;  // p = 0.3
    const Eigen::VectorXd limit = limit_distribution(s, point);
    CHECK(std::abs(limit[10] - 0.3) <= 1e-12);
    CHECK(std::abs(limit[0] - 0.7) <= 1e-12);
    CHECK(limit.segment(1, 9).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd boundary = Eigen::VectorXd::Zero(11);
    boundary[10] = 1.0;
    CHECK((limit_distribution(s, boundary) - boundary).cwiseAbs().maxCoeff() <= 1e-12);

    RandomStream rng(6);
    const Eigen::VectorXd q = random_distribution(11, rng);
    CHECK((limit_distribution(s, q) - propagate(k, q, 20.0)).cwiseAbs().maxCoeff() <= 1e-6);

    Eigen::MatrixXd runaway(2, 2);
    runaway << 0.5, 0.0, 0.0, 0.0;
    const SpectralData bad = spectral_decompose(GeneratorMatrix(runaway, 1.0));
    CHECK_THROWS_AS(limit_distribution(bad, Eigen::Vector2d(0.5, 0.5)), PreconditionError);
}

TEST_CASE("equal-gap kernel and closed form") {
    const double rate = 1.0;
    const GeneratorMatrix k = build_generator(projective_chain(rate), 101);
    const SpectralData s = spectral_decompose(k);
    const ZeroModes z = zero_modes(s);
    const GeneratorMatrix rebuilt = build_equal_gap_kernel(z, rate, 101);
    CHECK((rebuilt.entries() - k.entries()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(rebuilt.column_sum_residual() <= 1e-12);

    const SpectralData rs = spectral_decompose(rebuilt);
    for (Eigen::Index i = 0; i < rs.eigenvalues.size(); ++i)
        CHECK(std::min(std::abs(rs.eigenvalues[i]), std::abs(rs.eigenvalues[i] + rate)) <= 1e-10);

    RandomStream rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd p0 = random_distribution(101, rng);
        for (double t : {0.1, 1.0, 10.0})
            CHECK((closed_form_equal_gap(p0, t, z, rate) - propagate(rebuilt, p0, t)).cwiseAbs().maxCoeff() <= 1e-8);
        const Eigen::VectorXd half = closed_form_equal_gap(p0, std::log(2.0) / rate, z, rate);
        const Eigen::VectorXd expected = 0.5 * p0 + 0.5 * limit_distribution(s, p0);
        CHECK((half - expected).cwiseAbs().maxCoeff() <= 1e-15);
    }

    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(101, 1.0 / 101.0);
    const Eigen::VectorXd late = closed_form_equal_gap(uniform, 1e3, z, rate);
    CHECK(std::abs(late[0] - 0.5) <= 1e-12);
    CHECK(std::abs(late[100] - 0.5) <= 1e-12);

    ZeroModes broken = z;
    broken.left.row(0) *= 2.0;
    try {
        build_equal_gap_kernel(broken, rate, 101);
        FAIL("non-biorthonormal modes accepted");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("g_0 . f_0") != std::string::npos);
    }
}

TEST_CASE("one-step transition converges to the generator at first order") {
    const JumpChain chain = bell_chain(0.9);
    const Eigen::MatrixXd k = build_generator(chain, 101).entries();
    std::vector<double> errors;
    for (double dt : {1e-2, 1e-3}) {
        const Eigen::MatrixXd pi = jump_transition_matrix(chain, 101, dt);
        CHECK(std::abs(pi.colwise().sum().maxCoeff() - 1.0) <= 1e-12);
        errors.push_back(((pi - Eigen::MatrixXd::Identity(101, 101)) / dt - k).cwiseAbs().maxCoeff());
    }
    const double ratio = errors[0] / errors[1];
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
    CHECK_THROWS_AS(jump_transition_matrix(chain, 101, 100.0), PreconditionError);
}
