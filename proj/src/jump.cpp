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

#include "collapse/jump.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "collapse/error.hpp"

namespace collapse {
namespace {

// Below this |g(psi)| a probe is treated as a zero of g.
constexpr double kVanishingFunctional = 1e-14;

Eigen::VectorXd ring_profile(std::size_t period, std::span<const double> profile, const char* where) {
    require(period >= 1, where, "dimension must be at least 1");
    require(!profile.empty(), where, "profile must not be empty");
    Eigen::VectorXd ring = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(period));
    for (std::size_t k = 0; k < profile.size(); ++k) {
        require(std::isfinite(profile[k]) && profile[k] >= 0.0, where,
                "profile entries must be finite and nonnegative (offset " + std::to_string(k) + ")");
        ring[static_cast<Eigen::Index>(k % period)] += profile[k];
    }
    const double norm = ring.norm();
    require(norm > 0.0, where, "profile must have at least one positive entry");
    return ring / norm;
}

}  // namespace

void validate_rate(double rate) {
    require(std::isfinite(rate) && rate > 0.0, "JumpModel.rate",
            "jump rate must be finite and > 0 (got " + std::to_string(rate) + ")");
}

JumpModel::JumpModel(Eigen::MatrixXd weights, double rate)
    : weights_(std::move(weights)), rate_(rate) {
    validate_rate(rate);
    require(weights_.rows() >= 1 && weights_.cols() >= 1, "JumpModel", "empty weight matrix");
    require(weights_.allFinite() && (weights_.array() >= 0.0).all(), "JumpModel",
            "weights must be finite and nonnegative");
    squared_ = weights_.array().square().matrix();
    const Eigen::RowVectorXd column_mass = squared_.colwise().sum();
    for (Eigen::Index n = 0; n < column_mass.size(); ++n) {
        require(std::abs(column_mass[n] - 1.0) <= 1e-12, "JumpModel",
                "sum over xi of W(xi, n)^2 must equal 1 for every n (n = " + std::to_string(n) + ")");
    }
    overlap_ = weights_.transpose() * weights_;
}

JumpModel make_bell_jump(std::size_t dimension, std::span<const double> profile, double rate) {
    validate_rate(rate);
    const Eigen::VectorXd j = ring_profile(dimension, profile, "make_bell_jump");
    const auto d = static_cast<Eigen::Index>(dimension);
    Eigen::MatrixXd w(d, d);
    for (Eigen::Index xi = 0; xi < d; ++xi)
        for (Eigen::Index n = 0; n < d; ++n) w(xi, n) = j[((n - xi) % d + d) % d];
    return JumpModel(std::move(w), rate);
}

JumpModel make_sector_jump(const SectorMap& sectors, std::span<const double> profile, double rate) {
    validate_rate(rate);
    const auto s = static_cast<Eigen::Index>(sectors.sector_count());
    const Eigen::VectorXd j = ring_profile(sectors.sector_count(), profile, "make_sector_jump");
    Eigen::MatrixXd w(s, static_cast<Eigen::Index>(sectors.dimension()));
    for (Eigen::Index xi = 0; xi < s; ++xi)
        for (Eigen::Index i = 0; i < w.cols(); ++i) {
            const auto n = static_cast<Eigen::Index>(sectors.sector_of(static_cast<std::size_t>(i)));
            w(xi, i) = j[((n - xi) % s + s) % s];
        }
    return JumpModel(std::move(w), rate);
}

Eigen::VectorXd jump_probabilities(const StateVector& psi, const JumpModel& model) {
    require(psi.dimension() == model.dimension(), "sample_jump_parameter",
            "state dimension " + std::to_string(psi.dimension()) + " does not match model dimension " +
                std::to_string(model.dimension()));
    const Eigen::VectorXd born = psi.amplitudes().cwiseAbs2();
    Eigen::VectorXd table = model.squared_weights() * born;
    const double total = table.sum();
    if (!(std::abs(total - 1.0) <= 1e-12)) {
        throw NumericalError("jump probabilities sum to " + std::to_string(total));
    }
    return table;
}

std::size_t sample_jump_parameter(const StateVector& psi, const JumpModel& model, RandomStream& rng) {
    const Eigen::VectorXd table = jump_probabilities(psi, model);
    const double target = rng.uniform() * table.sum();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (Eigen::Index xi = 0; xi < table.size(); ++xi) {
        if (table[xi] <= 0.0) continue;
        last_positive = static_cast<std::size_t>(xi);
        cumulative += table[xi];
        if (target < cumulative) return last_positive;
    }
    return last_positive;
}

StateVector apply_jump(const StateVector& psi, std::size_t xi, const JumpModel& model) {
    require(psi.dimension() == model.dimension(), "apply_jump", "dimension mismatch");
    require(xi < model.outcome_count(), "apply_jump", "jump parameter out of range");
    const Eigen::VectorXd w = model.weights().row(static_cast<Eigen::Index>(xi)).transpose();
    Amplitudes out = psi.amplitudes().cwiseProduct(w.cast<Complex>());
    const double r2 = out.squaredNorm();
    require(r2 > 0.0, "apply_jump",
            "R(psi, xi) = 0 for xi = " + std::to_string(xi) + " (zero-probability branch)");
    out /= std::sqrt(r2);
    return StateVector::from_normalized(std::move(out));
}

Trajectory evolve_trajectory(const StateVector& initial, const JumpModel& model, double duration,
                             RandomStream& rng) {
    require(std::isfinite(duration) && duration >= 0.0, "evolve_trajectory", "duration must be >= 0");
    require(initial.dimension() == model.dimension(), "evolve_trajectory", "dimension mismatch");
    Trajectory result{initial, 0};
    double clock = rng.exponential(model.rate());
    while (clock <= duration) {
        const std::size_t xi = sample_jump_parameter(result.state, model, rng);
        result.state = apply_jump(result.state, xi, model);
        ++result.jumps;
        clock += rng.exponential(model.rate());
    }
    return result;
}

Ensemble evolve_ensemble(const Ensemble& ensemble, const JumpModel& model, double duration,
                         std::size_t workers, std::vector<std::size_t>& jump_counts) {
    require(std::isfinite(duration) && duration >= 0.0, "evolve_ensemble", "duration must be >= 0");
    const std::uint64_t next_seed = derive_seed(ensemble.seed(), 0x6576'6f6c'7665ull);
    if (ensemble.empty()) {
        jump_counts.clear();
        return Ensemble({}, next_seed, ensemble.time() + duration);
    }
    require(ensemble.dimension() == model.dimension(), "evolve_ensemble", "dimension mismatch");

    const std::size_t n = ensemble.size();
    std::vector<Member> out(n, ensemble[0]);
    jump_counts.assign(n, 0);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            RandomStream rng(ensemble.seed(), k);
            Trajectory t = evolve_trajectory(ensemble[k].state, model, duration, rng);
            out[k] = Member{std::move(t.state), ensemble[k].weight};
            jump_counts[k] = t.jumps;
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        run(0, n);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try {
                    run(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return Ensemble(std::move(out), next_seed, ensemble.time() + duration);
}

Ensemble evolve_ensemble(const Ensemble& ensemble, const JumpModel& model, double duration,
                         std::size_t workers) {
    std::vector<std::size_t> unused;
    return evolve_ensemble(ensemble, model, duration, workers, unused);
}

Complex exact_jump_average(const StateFunctional& g, const StateVector& psi, const JumpModel& model) {
    const Eigen::VectorXd table = jump_probabilities(psi, model);
    Complex total = 0.0;
    for (Eigen::Index xi = 0; xi < table.size(); ++xi) {
        if (table[xi] <= 0.0) continue;
        total += table[xi] * g(apply_jump(psi, static_cast<std::size_t>(xi), model));
    }
    return total;
}

LeftEigenReport check_left_eigen(const StateFunctional& g, const JumpModel& model,
                                 std::span<const StateVector> probes) {
    require(!probes.empty(), "check_left_eigen", "at least one probe is required");
    LeftEigenReport report;
    std::vector<std::pair<Complex, Complex>> usable;  // (g(psi), <g(J psi)>)
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const Complex before = g(probes[k]);
        if (std::abs(before) <= kVanishingFunctional) {
            report.ratios.emplace_back(std::nullopt);
            report.skipped.push_back(k);
            continue;
        }
        const Complex after = exact_jump_average(g, probes[k], model);
        report.ratios.emplace_back(after / before);
        usable.emplace_back(before, after);
    }
    require(!usable.empty(), "check_left_eigen", "g vanishes on every probe");

    Complex mean = 0.0;
    for (const auto& r : report.ratios)
        if (r) mean += *r;
    mean /= static_cast<double>(usable.size());
    report.overlap = mean;
    for (const auto& r : report.ratios)
        if (r) report.spread = std::max(report.spread, std::abs(*r - mean));
    for (const auto& [before, after] : usable)
        report.residual = std::max(report.residual, std::abs(after - mean * before));
    report.eigenvalue = -model.rate() * (1.0 - mean);
    return report;
}

}  // namespace collapse
