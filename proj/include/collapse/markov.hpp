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

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "collapse/jump.hpp"

namespace collapse {

/// One outcome of a qubit jump in the reduced coordinate p = |psi_1|^2.
struct Branch {
    double probability;
    double target;
};

/// The qubit jump dynamics reduced to p = |psi_1|^2. Diagonal jumps with
/// positive factors leave the relative phase untouched, so p alone carries
/// the distribution.
class JumpChain {
  public:
    /// squared_weights(xi, n) = W(xi, n)^2 for a two-level model.
    JumpChain(const Eigen::Matrix2d& squared_weights, double rate);

    double rate() const noexcept { return rate_; }
    const Eigen::Matrix2d& squared_weights() const noexcept { return squared_; }

    /// Branch xi: probability R^2_xi(p) = W(xi,0)^2 p + W(xi,1)^2 (1-p) and
    /// target p'_xi(p) = W(xi,0)^2 p / R^2_xi(p). A branch of zero
    /// probability reports target p.
    std::array<Branch, 2> branches(double p) const;

  private:
    Eigen::Matrix2d squared_;
    double rate_;
};

JumpChain reduce_qubit_model(const JumpModel& model);

/// Representative points of B bins on [0, 1]: k / (B - 1), so both fixed
/// points 0 and 1 are nodes.
std::vector<double> bin_nodes(std::size_t bins);
/// B + 1 edges: 0, the midpoints between consecutive nodes, and 1.
std::vector<double> bin_edges(std::size_t bins);

/// Dense generator K acting on bin distributions (column convention:
/// dP/dt = K P). rate() sets the scale used for zero-mode classification.
class GeneratorMatrix {
  public:
    GeneratorMatrix(Eigen::MatrixXd entries, double rate);

    std::size_t bins() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    double rate() const noexcept { return rate_; }
    std::vector<double> nodes() const { return bin_nodes(bins()); }
    std::vector<double> edges() const { return bin_edges(bins()); }

    /// max_k |sum_i K(i, k)|.
    double column_sum_residual() const;

  private:
    Eigen::MatrixXd entries_;
    double rate_;
};

/// Column-stochastic matrix of a single jump: each branch deposits its
/// probability at p'_xi, split linearly between the two neighbouring nodes
/// so the first moment of the deposit is exact.
Eigen::MatrixXd single_jump_transition(const JumpChain& chain, std::size_t bins);

/// K = Gamma (T - 1); the diagonal is set so every column sums to zero.
GeneratorMatrix build_generator(const JumpChain& chain, std::size_t bins);

/// Exact transition matrix over a finite step: the Poisson mixture
/// sum_n e^{-Gamma dt} (Gamma dt)^n / n! T^n, truncated below 1e-18.
Eigen::MatrixXd jump_transition_matrix(const JumpChain& chain, std::size_t bins, double dt);

/// Biorthonormal eigen-decomposition K = sum_N (-lambda_N) f_N g_N^T.
struct SpectralData {
    /// The eigenvalues -lambda_N of K.
    Eigen::VectorXcd eigenvalues;
    /// Columns are the right eigenvectors f_N.
    Eigen::MatrixXcd right;
    /// Rows are the left eigenvectors g_N, with left * right = identity.
    Eigen::MatrixXcd left;
    std::vector<bool> zero_mode;
    double rate = 1.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    std::vector<std::size_t> zero_mode_indices() const;
    /// Mode indices ordered by decreasing real part, then by imaginary part.
    std::vector<std::size_t> order_by_real_part() const;

    /// sum_N f_N e^{-lambda_N t} g_N^T.
    Eigen::MatrixXcd propagator(double t) const;
    /// max |g_M . f_N - delta_MN|.
    double biorthogonality_residual() const;
    /// max |sum_N f_N g_N^T - 1|.
    double completeness_residual() const;
};

/// Zero-mode classification threshold relative to the generator's rate.
inline constexpr double kZeroModeTolerance = 1e-8;

/// Full eigen-decomposition of K with paired left and right vectors.
/// Repeated eigenvalues are resolved from the null space of K - mu; a
/// non-diagonalizable K raises DefectiveSpectrumError. When several zero
/// modes exist their right vectors are normalized so that each is 1 on its
/// own pivot node and 0 on the others (point masses for absorbing chains).
SpectralData spectral_decompose(const GeneratorMatrix& generator);

/// Real zero modes: right is B x m (columns f_n), left is m x B (rows g_n).
struct ZeroModes {
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;

    std::size_t count() const noexcept { return static_cast<std::size_t>(right.cols()); }
};

ZeroModes zero_modes(const SpectralData& spectrum);

/// exp(K t) P0 by scaling and squaring; no renormalization is applied.
Eigen::VectorXd propagate(const GeneratorMatrix& generator, const Eigen::VectorXd& initial, double t);

/// sum_n f_n (g_n . P0) over the zero modes.
Eigen::VectorXd limit_distribution(const SpectralData& spectrum, const Eigen::VectorXd& initial);

/// K = -lambda (1 - sum_n f_n g_n^T): every non-zero eigenvalue equals -lambda.
GeneratorMatrix build_equal_gap_kernel(const ZeroModes& modes, double rate, std::size_t bins);

/// e^{-lambda t} P0 + (1 - e^{-lambda t}) sum_n f_n (g_n . P0).
Eigen::VectorXd closed_form_equal_gap(const Eigen::VectorXd& initial, double t,
                                      const ZeroModes& modes, double rate);

}  // namespace collapse
