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
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "collapse/jump.hpp"

namespace collapse {

/// Hermitian, unit-trace, positive semidefinite d x d matrix.
class DensityMatrix {
  public:
    /// Validates Hermiticity and trace to 1e-12 and eigenvalues >= -1e-10.
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    static DensityMatrix pure(const StateVector& psi);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    Complex operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double min_eigenvalue() const;

  private:
    Eigen::MatrixXcd entries_;
};

/// rho_ij = sum_k w_k psi_i psi_j^*.
DensityMatrix ensemble_density(const Ensemble& ensemble);

/// Entrywise Monte Carlo estimate of rho with standard errors
/// sqrt(var Re + var Im); strata as in weighted_mean.
struct DensityEstimate {
    Eigen::MatrixXcd mean;
    Eigen::MatrixXd error;
};

DensityEstimate estimate_density(const Ensemble& ensemble, std::size_t stratum_size = 0);

/// The lift of a Bell-type jump generator to bilinears: entry (i, j) decays
/// at rate Gamma (1 - Lambda_ij). Stored entrywise because the lift is
/// diagonal in the entry basis for these models.
class LiftedGenerator {
  public:
    explicit LiftedGenerator(Eigen::MatrixXd rates);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rates_.rows()); }
    /// kappa_{ij,ij} = -Gamma (1 - Lambda_ij) <= 0.
    const Eigen::MatrixXd& rates() const noexcept { return rates_; }

  private:
    Eigen::MatrixXd rates_;
};

LiftedGenerator lift_generator(const JumpModel& model);

/// Brute-force check of the lift: max_ij |sum_xi R^2 (J_xi psi)_i (J_xi psi)_j^*
/// - Lambda_ij psi_i psi_j^*| by exact enumeration over xi.
double lift_residual(const JumpModel& model, const StateVector& psi);

/// rho_ij(t) = rho_ij(0) exp(kappa_ij t). t may be +infinity.
DensityMatrix evolve_density(const LiftedGenerator& lifted, const DensityMatrix& initial, double t);

/// Slack added to every 3-sigma band so that noiseless entries compare equal
/// up to rounding.
inline constexpr double kBandFloor = 1e-12;

/// deviation / sigma, or 0 when the deviation is within kBandFloor.
inline double band_z(double deviation, double sigma) {
    if (deviation <= kBandFloor) return 0.0;
    return sigma > 0.0 ? deviation / sigma : std::numeric_limits<double>::infinity();
}

struct DensityComparison {
    double time = 0.0;
    Eigen::MatrixXcd monte_carlo;
    Eigen::MatrixXcd analytic;
    Eigen::MatrixXd error;
    /// max_ij |rho_MC - rho_analytic|.
    double max_deviation = 0.0;
    /// max_ij |rho_MC - rho_analytic| / error_ij over entries with error > 0.
    double max_z = 0.0;
    /// Every entry within 3 error + kBandFloor.
    bool within_band = true;
};

struct MonteCarloOptions {
    std::size_t trajectories = 1000;  // per decomposition member
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

/// Evolves `trajectories` copies of every decomposition member and compares
/// the ensemble density with the entrywise closed form at each time.
std::vector<DensityComparison> compare_mc_density(const JumpModel& model, const Ensemble& decomposition,
                                                  std::span<const double> times,
                                                  const MonteCarloOptions& options);

struct DistancePoint {
    double time = 0.0;
    Eigen::MatrixXd distance;  // |rho_A - rho_B| entrywise
    Eigen::MatrixXd sigma;     // sqrt(err_A^2 + err_B^2)
    double max_distance = 0.0;
    double max_z = 0.0;
    bool within_band = true;
};

struct DistanceReport {
    std::vector<DistancePoint> points;
    double sup_distance = 0.0;
    bool indistinguishable = true;
};

/// Evolves both decompositions under independent derived seeds and reports
/// the entrywise distance between their density matrices at each time.
DistanceReport ensemble_distance(const Ensemble& first, const Ensemble& second, const JumpModel& model,
                                 std::span<const double> times, const MonteCarloOptions& options);

/// ensemble_distance for two decompositions of the same density matrix
/// (equal within 1e-10; rejected otherwise).
DistanceReport gisin_experiment(const Ensemble& first, const Ensemble& second, const JumpModel& model,
                                std::span<const double> times, const MonteCarloOptions& options);

}  // namespace collapse
