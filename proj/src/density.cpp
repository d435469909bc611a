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

#include "collapse/density.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "collapse/error.hpp"
#include "collapse/stats.hpp"

namespace collapse {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

DensityMatrix::DensityMatrix(MatrixXcd entries) : entries_(std::move(entries)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() >= 1, "DensityMatrix",
            "matrix must be square and non-empty");
    require(entries_.allFinite(), "DensityMatrix", "non-finite entries");
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw PreconditionError("DensityMatrix", "not Hermitian (deviation " + std::to_string(asym) + ")");
    const Complex trace = entries_.trace();
    if (std::abs(trace - 1.0) > 1e-12) {
        throw PreconditionError("DensityMatrix", "trace " + std::to_string(trace.real()) + " differs from 1");
    }
    if (min_eigenvalue() < -1e-10) throw PreconditionError("DensityMatrix", "not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
    const MatrixXcd hermitian = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DensityEstimate estimate_density(const Ensemble& ensemble, std::size_t stratum_size) {
    require(!ensemble.empty(), "ensemble_density", "ensemble is empty");
    const std::size_t n = ensemble.size();
    const auto d = static_cast<Index>(ensemble.dimension());
    if (stratum_size == 0) stratum_size = n;
    require(n % stratum_size == 0, "ensemble_density", "ensemble size is not a multiple of the stratum size");

    DensityEstimate out{MatrixXcd::Zero(d, d), MatrixXd::Zero(d, d)};
    MatrixXd variance = MatrixXd::Zero(d, d);
    for (std::size_t begin = 0; begin < n; begin += stratum_size) {
        double mass = 0.0;
        MatrixXcd local = MatrixXcd::Zero(d, d);
        for (std::size_t k = begin; k < begin + stratum_size; ++k) {
            const auto& a = ensemble[k].state.amplitudes();
            local += ensemble[k].weight * (a * a.adjoint());
            mass += ensemble[k].weight;
        }
        out.mean += local;
        if (stratum_size < 2 || mass <= 0.0) continue;
        const MatrixXcd centre = local / mass;
        MatrixXd spread = MatrixXd::Zero(d, d);
        for (std::size_t k = begin; k < begin + stratum_size; ++k) {
            const auto& a = ensemble[k].state.amplitudes();
            const double w = ensemble[k].weight;
            spread += (w * w) * (a * a.adjoint() - centre).cwiseAbs2();
        }
        variance += spread * static_cast<double>(stratum_size) / static_cast<double>(stratum_size - 1);
    }
    // Exact Hermitian symmetry of the mean.
    out.mean = 0.5 * (out.mean + out.mean.adjoint()).eval();
    out.error = variance.cwiseSqrt();
    return out;
}

DensityMatrix ensemble_density(const Ensemble& ensemble) {
    require(!ensemble.empty(), "ensemble_density", "ensemble is empty");
    const auto d = static_cast<Index>(ensemble.dimension());
    MatrixXcd rho = MatrixXcd::Zero(d, d);
    for (const Member& m : ensemble.members()) {
        const auto& a = m.state.amplitudes();
        rho += m.weight * (a * a.adjoint());
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

LiftedGenerator::LiftedGenerator(MatrixXd rates) : rates_(std::move(rates)) {
    require(rates_.rows() == rates_.cols() && rates_.rows() >= 1, "LiftedGenerator", "rates must be square");
    require(rates_.allFinite() && (rates_.array() <= 0.0).all(), "LiftedGenerator", "rates must be real and <= 0");
    require(rates_.diagonal().cwiseAbs().maxCoeff() == 0.0, "LiftedGenerator", "diagonal entries must not decay");
}

LiftedGenerator lift_generator(const JumpModel& model) {
    const auto d = static_cast<Index>(model.dimension());
    MatrixXd rates(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            rates(i, j) = i == j ? 0.0 : -model.rate() * std::max(0.0, 1.0 - model.overlap()(i, j));
    return LiftedGenerator(std::move(rates));
}

double lift_residual(const JumpModel& model, const StateVector& psi) {
    const Eigen::VectorXd table = jump_probabilities(psi, model);
    const auto d = static_cast<Index>(model.dimension());
    MatrixXcd average = MatrixXcd::Zero(d, d);
    for (Index xi = 0; xi < table.size(); ++xi) {
        if (table[xi] <= 0.0) continue;
        const StateVector jumped = apply_jump(psi, static_cast<std::size_t>(xi), model);
        const Amplitudes& a = jumped.amplitudes();
        average += table[xi] * (a * a.adjoint());
    }
    const auto& a = psi.amplitudes();
    const MatrixXcd expected = model.overlap().cast<Complex>().cwiseProduct(a * a.adjoint());
    return (average - expected).cwiseAbs().maxCoeff();
}

DensityMatrix evolve_density(const LiftedGenerator& lifted, const DensityMatrix& initial, double t) {
    require(lifted.dimension() == initial.dimension(), "evolve_density", "dimension mismatch");
    require(!std::isnan(t) && t >= 0.0, "evolve_density", "time must be >= 0");
    MatrixXcd rho = initial.entries();
    const auto d = rho.rows();
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            const double rate = lifted.rates()(i, j);
            if (rate == 0.0) continue;
            rho(i, j) *= std::isinf(t) ? 0.0 : std::exp(rate * t);
        }
    return DensityMatrix(std::move(rho));
}

namespace {

void check_times(std::span<const double> times, const char* where) {
    require(!times.empty(), where, "at least one time is required");
    double previous = 0.0;
    for (double t : times) {
        require(std::isfinite(t) && t >= previous, where, "times must be finite, >= 0 and nondecreasing");
        previous = t;
    }
}

// Evolve `ensemble` through `times` (from its own time stamp) and call visit at each.
template <typename Visit>
void walk_times(Ensemble ensemble, const JumpModel& model, std::span<const double> times, std::size_t workers,
                Visit&& visit) {
    double now = ensemble.time();
    for (double t : times) {
        if (t > now) {
            ensemble = evolve_ensemble(ensemble, model, t - now, workers);
            now = t;
        }
        visit(ensemble);
    }
}

}  // namespace

std::vector<DensityComparison> compare_mc_density(const JumpModel& model, const Ensemble& decomposition,
                                                  std::span<const double> times,
                                                  const MonteCarloOptions& options) {
    require(options.trajectories > 0, "compare_mc_density", "trajectories per member must be positive");
    require(!decomposition.empty(), "compare_mc_density", "decomposition is empty");
    require(decomposition.dimension() == model.dimension(), "compare_mc_density", "dimension mismatch");
    check_times(times, "compare_mc_density");

    const DensityMatrix initial = ensemble_density(decomposition);
    const LiftedGenerator lifted = lift_generator(model);
    Ensemble start = Ensemble::expand(Ensemble(decomposition.members(), options.seed, 0.0), options.trajectories,
                                      options.seed);

    std::vector<DensityComparison> out;
    std::size_t index = 0;
    walk_times(std::move(start), model, times, options.workers, [&](const Ensemble& e) {
        DensityComparison c;
        c.time = times[index++];
        const DensityEstimate estimate = estimate_density(e, options.trajectories);
        c.monte_carlo = estimate.mean;
        c.error = estimate.error;
        c.analytic = evolve_density(lifted, initial, c.time).entries();
        const MatrixXd deviation = (c.monte_carlo - c.analytic).cwiseAbs();
        c.max_deviation = deviation.maxCoeff();
        for (Index i = 0; i < deviation.rows(); ++i)
            for (Index j = 0; j < deviation.cols(); ++j) {
                c.max_z = std::max(c.max_z, band_z(deviation(i, j), c.error(i, j)));
                if (deviation(i, j) > 3.0 * c.error(i, j) + kBandFloor) c.within_band = false;
            }
        out.push_back(std::move(c));
    });
    return out;
}

DistanceReport ensemble_distance(const Ensemble& first, const Ensemble& second, const JumpModel& model,
                                 std::span<const double> times, const MonteCarloOptions& options) {
    require(options.trajectories > 0, "ensemble_distance", "trajectories per member must be positive");
    require(!first.empty() && !second.empty(), "ensemble_distance", "decompositions must be non-empty");
    require(first.dimension() == model.dimension() && second.dimension() == model.dimension(),
            "ensemble_distance", "dimension mismatch");
    check_times(times, "ensemble_distance");

    const std::uint64_t seed_a = derive_seed(options.seed, 0xA);
    const std::uint64_t seed_b = derive_seed(options.seed, 0xB);
    std::vector<DensityEstimate> a, b;
    walk_times(Ensemble::expand(Ensemble(first.members(), seed_a), options.trajectories, seed_a), model, times,
               options.workers, [&](const Ensemble& e) { a.push_back(estimate_density(e, options.trajectories)); });
    walk_times(Ensemble::expand(Ensemble(second.members(), seed_b), options.trajectories, seed_b), model, times,
               options.workers, [&](const Ensemble& e) { b.push_back(estimate_density(e, options.trajectories)); });

    DistanceReport report;
    for (std::size_t k = 0; k < times.size(); ++k) {
        DistancePoint p;
        p.time = times[k];
        p.distance = (a[k].mean - b[k].mean).cwiseAbs();
        p.sigma = (a[k].error.cwiseAbs2() + b[k].error.cwiseAbs2()).cwiseSqrt();
        p.max_distance = p.distance.maxCoeff();
        for (Index i = 0; i < p.distance.rows(); ++i)
            for (Index j = 0; j < p.distance.cols(); ++j) {
                p.max_z = std::max(p.max_z, band_z(p.distance(i, j), p.sigma(i, j)));
                if (p.distance(i, j) > 3.0 * p.sigma(i, j) + kBandFloor) p.within_band = false;
            }
        report.sup_distance = std::max(report.sup_distance, p.max_distance);
        report.indistinguishable = report.indistinguishable && p.within_band;
        report.points.push_back(std::move(p));
    }
    return report;
}

DistanceReport gisin_experiment(const Ensemble& first, const Ensemble& second, const JumpModel& model,
                                std::span<const double> times, const MonteCarloOptions& options) {
    require(!first.empty() && !second.empty(), "gisin_experiment", "decompositions must be non-empty");
    require(first.dimension() == second.dimension(), "gisin_experiment", "dimension mismatch");
    const double gap =
        (ensemble_density(first).entries() - ensemble_density(second).entries()).cwiseAbs().maxCoeff();
    require(gap <= 1e-10, "gisin_experiment",
            "initial density matrices differ by " + std::to_string(gap) + " (must agree within 1e-10)");
    return ensemble_distance(first, second, model, times, options);
}

}  // namespace collapse
