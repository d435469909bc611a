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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "collapse/hilbert.hpp"

namespace collapse {

/// Quantum-jump model: at Poisson times of intensity rate(), psi jumps to
/// (J_xi psi)_n = W(xi, n) psi_n / R(psi, xi), with xi drawn with probability
/// R^2(psi, xi) = sum_n W(xi, n)^2 |psi_n|^2.
///
/// Columns of W are unit vectors (sum_xi W(xi, n)^2 = 1), so R^2 is a
/// probability table for every psi and the overlap matrix
/// Lambda = W^T W has a unit diagonal.
class JumpModel {
  public:
    JumpModel(Eigen::MatrixXd weights, double rate);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(weights_.cols()); }
    std::size_t outcome_count() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    double rate() const noexcept { return rate_; }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    const Eigen::MatrixXd& squared_weights() const noexcept { return squared_; }
    /// Lambda_{nm} = sum_xi W(xi, n) W(xi, m).
    const Eigen::MatrixXd& overlap() const noexcept { return overlap_; }

  private:
    Eigen::MatrixXd weights_;
    Eigen::MatrixXd squared_;
    Eigen::MatrixXd overlap_;
    double rate_;
};

/// Throws PreconditionError("JumpModel.rate") unless rate is finite and > 0.
void validate_rate(double rate);

/// Bell-type jump on a periodic ring of d sites: W(xi, n) = j((n - xi) mod d).
/// profile[k] is the weight at offset k; offsets >= d wrap around and
/// accumulate. The ring profile is rescaled so that sum_k j(k)^2 = 1.
JumpModel make_bell_jump(std::size_t dimension, std::span<const double> profile, double rate);

/// Jump acting only on the sector label: W(xi, i) = j((sector(i) - xi) mod S)
/// with S sectors, so every member of a sector is scaled identically.
JumpModel make_sector_jump(const SectorMap& sectors, std::span<const double> profile, double rate);

/// The table R^2(psi, xi) for all xi.
Eigen::VectorXd jump_probabilities(const StateVector& psi, const JumpModel& model);

std::size_t sample_jump_parameter(const StateVector& psi, const JumpModel& model, RandomStream& rng);

StateVector apply_jump(const StateVector& psi, std::size_t xi, const JumpModel& model);

struct Trajectory {
    StateVector state;
    std::size_t jumps = 0;
};

/// Piecewise-constant evolution over [0, duration] with exponential
/// inter-arrival times; no drift between jumps.
Trajectory evolve_trajectory(const StateVector& initial, const JumpModel& model, double duration,
                             RandomStream& rng);

/// Evolves every member for `duration`. Member k draws from the stream
/// (e.seed(), k); the result carries a seed derived from e.seed() so chained
/// calls use fresh streams. Output is independent of `workers`.
Ensemble evolve_ensemble(const Ensemble& ensemble, const JumpModel& model, double duration,
                         std::size_t workers = 1);

/// Same as evolve_ensemble but also reports each member's jump count.
Ensemble evolve_ensemble(const Ensemble& ensemble, const JumpModel& model, double duration,
                         std::size_t workers, std::vector<std::size_t>& jump_counts);

using StateFunctional = std::function<Complex(const StateVector&)>;

/// <g(J psi)> = sum_xi R^2(psi, xi) g(J_xi psi), summed exactly over xi.
Complex exact_jump_average(const StateFunctional& g, const StateVector& psi, const JumpModel& model);

struct LeftEigenReport {
    /// <g(J psi)> / g(psi) per probe; empty where g(psi) vanished.
    std::vector<std::optional<Complex>> ratios;
    std::vector<std::size_t> skipped;
    /// Mean ratio over the usable probes.
    Complex overlap;
    /// max |ratio - overlap| over usable probes.
    double spread = 0.0;
    /// max |<g(J psi)> - overlap g(psi)| over usable probes.
    double residual = 0.0;
    /// The generator eigenvalue -Gamma (1 - overlap).
    Complex eigenvalue;
};

/// Tests whether g is a left eigenfunction of the jump generator by
/// comparing <g(J psi)> with g(psi) on each probe.
LeftEigenReport check_left_eigen(const StateFunctional& g, const JumpModel& model,
                                 std::span<const StateVector> probes);

}  // namespace collapse
