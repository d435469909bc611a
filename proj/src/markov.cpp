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

#include "collapse/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "collapse/error.hpp"
#include "collapse/expm.hpp"

namespace collapse {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

JumpChain::JumpChain(const Eigen::Matrix2d& squared_weights, double rate)
    : squared_(squared_weights), rate_(rate) {
    validate_rate(rate);
    require(squared_.allFinite() && (squared_.array() >= 0.0).all(), "JumpChain",
            "squared weights must be finite and nonnegative");
    for (Index n = 0; n < 2; ++n) {
        require(std::abs(squared_.col(n).sum() - 1.0) <= 1e-12, "JumpChain",
                "branch probabilities must sum to 1");
    }
}

std::array<Branch, 2> JumpChain::branches(double p) const {
    std::array<Branch, 2> out{};
    for (Index xi = 0; xi < 2; ++xi) {
        const double up = squared_(xi, 0) * p;
        const double r2 = up + squared_(xi, 1) * (1.0 - p);
        out[static_cast<std::size_t>(xi)] = {r2, r2 > 0.0 ? up / r2 : p};
    }
    return out;
}

JumpChain reduce_qubit_model(const JumpModel& model) {
    require(model.dimension() == 2, "reduce_qubit_model",
            "model dimension must be 2 (got " + std::to_string(model.dimension()) + ")");
    require(model.outcome_count() == 2, "reduce_qubit_model", "model must have two jump outcomes");
    return JumpChain(model.squared_weights(), model.rate());
}

std::vector<double> bin_nodes(std::size_t bins) {
    require(bins >= 2, "bin_nodes", "at least two nodes are required");
    std::vector<double> nodes(bins);
    for (std::size_t k = 0; k < bins; ++k)
        nodes[k] = static_cast<double>(k) / static_cast<double>(bins - 1);
    nodes.back() = 1.0;
    return nodes;
}

std::vector<double> bin_edges(std::size_t bins) {
    const auto nodes = bin_nodes(bins);
    std::vector<double> edges(bins + 1);
    edges.front() = 0.0;
    for (std::size_t k = 1; k < bins; ++k) edges[k] = 0.5 * (nodes[k - 1] + nodes[k]);
    edges.back() = 1.0;
    return edges;
}

GeneratorMatrix::GeneratorMatrix(MatrixXd entries, double rate)
    : entries_(std::move(entries)), rate_(rate) {
    require(entries_.rows() == entries_.cols() && entries_.rows() >= 1, "GeneratorMatrix",
            "generator must be a non-empty square matrix");
    require(entries_.allFinite(), "GeneratorMatrix", "generator has non-finite entries");
    require(std::isfinite(rate) && rate > 0.0, "GeneratorMatrix", "rate scale must be > 0");
}

double GeneratorMatrix::column_sum_residual() const {
    return entries_.colwise().sum().cwiseAbs().maxCoeff();
}

MatrixXd single_jump_transition(const JumpChain& chain, std::size_t bins) {
    require(bins >= 3, "build_generator", "bin count must be at least 3 (got " + std::to_string(bins) + ")");
    const auto nodes = bin_nodes(bins);
    const auto b = static_cast<Index>(bins);
    const double last = static_cast<double>(bins - 1);
    MatrixXd t = MatrixXd::Zero(b, b);
    for (Index k = 0; k < b; ++k) {
        const auto branches = chain.branches(nodes[static_cast<std::size_t>(k)]);
        const double mass = branches[0].probability + branches[1].probability;
        for (const Branch& branch : branches) {
            if (branch.probability <= 0.0) continue;
            const double weight = branch.probability / mass;
            const double position = std::clamp(branch.target, 0.0, 1.0) * last;
            auto lower = static_cast<Index>(std::floor(position));
            if (lower >= b - 1) {
                t(b - 1, k) += weight;
                continue;
            }
            const double frac = position - static_cast<double>(lower);
            t(lower, k) += weight * (1.0 - frac);
            t(lower + 1, k) += weight * frac;
        }
    }
    return t;
}

GeneratorMatrix build_generator(const JumpChain& chain, std::size_t bins) {
    MatrixXd k = chain.rate() * single_jump_transition(chain, bins);
    for (Index c = 0; c < k.cols(); ++c) {
        double off = 0.0;
        for (Index r = 0; r < k.rows(); ++r)
            if (r != c) off += k(r, c);
        k(c, c) = -off;
    }
    return GeneratorMatrix(std::move(k), chain.rate());
}

MatrixXd jump_transition_matrix(const JumpChain& chain, std::size_t bins, double dt) {
    require(std::isfinite(dt) && dt >= 0.0, "jump_transition_matrix", "time step must be >= 0");
    const double mean = chain.rate() * dt;
    require(mean <= 50.0, "jump_transition_matrix", "rate * dt must not exceed 50");
    const MatrixXd t = single_jump_transition(chain, bins);
    const auto b = t.rows();
    MatrixXd power = MatrixXd::Identity(b, b);
    double poisson = std::exp(-mean);
    MatrixXd result = poisson * power;
    double remaining = 1.0 - poisson;
    for (int n = 1; remaining > 1e-18 && n < 10000; ++n) {
        power = t * power;
        poisson *= mean / n;
        result += poisson * power;
        remaining -= poisson;
        if (poisson < 1e-300) break;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Spectral decomposition

namespace {

struct Cluster {
    std::vector<Index> members;
    Complex center;
    bool real = false;
};

std::vector<Cluster> cluster_eigenvalues(const VectorXcd& values, double tolerance) {
    const Index n = values.size();
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b)
            if (std::abs(values[a] - values[b]) <= tolerance) parent[static_cast<std::size_t>(find(a))] = find(b);

    std::vector<Cluster> clusters;
    std::vector<Index> slot(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        const Index root = find(i);
        auto& s = slot[static_cast<std::size_t>(root)];
        if (s < 0) {
            s = static_cast<Index>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(s)].members.push_back(i);
    }
    for (Cluster& c : clusters) {
        Complex sum = 0.0;
        for (Index i : c.members) sum += values[i];
        c.center = sum / static_cast<double>(c.members.size());
        c.real = std::abs(c.center.imag()) <= tolerance;
        if (c.real) c.center = c.center.real();
    }
    return clusters;
}

// Orthonormal basis of the numerical null space of A, or fewer columns than
// requested when the null space is too small.
MatrixXcd null_space(const MatrixXcd& a, Index wanted, double rank_tolerance, double& smallest_kept) {
    Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Index n = a.cols();
    smallest_kept = s[n - wanted];
    Index available = 0;
    for (Index i = n - 1; i >= 0 && s[i] <= rank_tolerance; --i) ++available;
    const Index take = std::min(wanted, available);
    return svd.matrixV().rightCols(take);
}

MatrixXd real_null_space(const MatrixXd& a, Index wanted, double rank_tolerance, double& smallest_kept) {
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Index n = a.cols();
    smallest_kept = s[n - wanted];
    Index available = 0;
    for (Index i = n - 1; i >= 0 && s[i] <= rank_tolerance; --i) ++available;
    const Index take = std::min(wanted, available);
    return svd.matrixV().rightCols(take);
}

std::string describe(Complex z) {
    return "(" + std::to_string(z.real()) + (z.imag() < 0 ? " - " : " + ") +
           std::to_string(std::abs(z.imag())) + "i)";
}

// Rescale the zero-mode block so f_n is 1 at its pivot node and 0 at the other pivots.
void pin_zero_modes(MatrixXcd& f, const std::vector<Index>& columns) {
    const Index m = static_cast<Index>(columns.size());
    const Index b = f.rows();
    MatrixXd block(b, m);
    for (Index c = 0; c < m; ++c) block.col(c) = f.col(columns[static_cast<std::size_t>(c)]).real();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(block.transpose());
    const auto& perm = qr.colsPermutation().indices();
    MatrixXd pivots(m, m);
    for (Index r = 0; r < m; ++r) pivots.row(r) = block.row(perm[r]);
    const MatrixXd pinned = block * pivots.inverse();
    for (Index c = 0; c < m; ++c) f.col(columns[static_cast<std::size_t>(c)]) = pinned.col(c).cast<Complex>();
}

}  // namespace

SpectralData spectral_decompose(const GeneratorMatrix& generator) {
    const MatrixXd& k = generator.entries();
    const Index b = k.rows();
    const double norm1 = k.cwiseAbs().colwise().sum().maxCoeff();
    const double scale = std::max(generator.rate(), norm1);
    const double cluster_tolerance = 1e-9 * scale;
    const double rank_tolerance = 1e-7 * scale;

    Eigen::EigenSolver<MatrixXd> solver(k, true);
    if (solver.info() != Eigen::Success) throw NumericalError("spectral_decompose: eigen-solver did not converge");
    const VectorXcd raw_values = solver.eigenvalues();
    const MatrixXcd raw_vectors = solver.eigenvectors();

    auto clusters = cluster_eigenvalues(raw_values, cluster_tolerance);

    MatrixXcd f(b, b);
    VectorXcd center(b);
    std::vector<Index> cluster_of(static_cast<std::size_t>(b));
    std::vector<std::vector<Index>> columns(clusters.size());
    Index next = 0;

    // Real and upper-half-plane clusters first; lower ones are conjugates.
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_partition(order.begin(), order.end(), [&](std::size_t a) {
        return clusters[a].real || clusters[a].center.imag() > 0;
    });

    std::vector<bool> done(clusters.size(), false);
    for (std::size_t ci : order) {
        if (done[ci]) continue;
        const Cluster& c = clusters[ci];
        const auto m = static_cast<Index>(c.members.size());
        MatrixXcd block(b, m);
        if (m == 1) {
            block.col(0) = raw_vectors.col(c.members.front());
            if (c.real) block.col(0) = block.col(0).real().cast<Complex>();
        } else {
            double smallest = 0.0;
            if (c.real) {
                const MatrixXd shifted = k - c.center.real() * MatrixXd::Identity(b, b);
                const MatrixXd basis = real_null_space(shifted, m, rank_tolerance, smallest);
                if (basis.cols() < m) {
                    throw DefectiveSpectrumError(
                        "spectral_decompose: merged eigenvalues at " + describe(c.center) + ": multiplicity " +
                        std::to_string(m) + " but eigenspace dimension " + std::to_string(basis.cols()) +
                        " (singular value " + std::to_string(smallest) + ")");
                }
                block = basis.cast<Complex>();
            } else {
                const MatrixXcd shifted = k.cast<Complex>() - c.center * MatrixXcd::Identity(b, b);
                const MatrixXcd basis = null_space(shifted, m, rank_tolerance, smallest);
                if (basis.cols() < m) {
                    throw DefectiveSpectrumError(
                        "spectral_decompose: merged eigenvalues at " + describe(c.center) + ": multiplicity " +
                        std::to_string(m) + " but eigenspace dimension " + std::to_string(basis.cols()));
                }
                block = basis;
            }
        }
        auto place = [&](std::size_t cluster_index, const MatrixXcd& vectors) {
            for (Index j = 0; j < vectors.cols(); ++j) {
                f.col(next) = vectors.col(j);
                center[next] = clusters[cluster_index].center;
                cluster_of[static_cast<std::size_t>(next)] = static_cast<Index>(cluster_index);
                columns[cluster_index].push_back(next);
                ++next;
            }
            done[cluster_index] = true;
        };
        place(ci, block);
        if (!c.real) {
            // Partner cluster around conj(center).
            std::size_t partner = clusters.size();
            double best = 0.0;
            for (std::size_t cj = 0; cj < clusters.size(); ++cj) {
                if (done[cj] || clusters[cj].real) continue;
                const double gap = std::abs(clusters[cj].center - std::conj(c.center));
                if (partner == clusters.size() || gap < best) {
                    partner = cj;
                    best = gap;
                }
            }
            if (partner == clusters.size() || clusters[partner].members.size() != c.members.size()) {
                throw NumericalError("spectral_decompose: complex eigenvalue " + describe(c.center) +
                                     " has no conjugate partner");
            }
            place(partner, block.conjugate());
        }
    }

    // Several zero modes: pin them to their pivot nodes.
    std::vector<Index> zero_columns;
    for (Index j = 0; j < b; ++j)
        if (clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(j)])].real &&
            std::abs(center[j]) <= kZeroModeTolerance * generator.rate())
            zero_columns.push_back(j);
    if (zero_columns.size() > 1) pin_zero_modes(f, zero_columns);

    // Nearly parallel eigenvectors with nearly equal eigenvalues signal a
    // perturbed Jordan block.
    for (Index a = 0; a < b; ++a) {
        for (Index c = a + 1; c < b; ++c) {
            if (std::abs(center[a] - center[c]) > 1e-6 * scale) continue;
            if (cluster_of[static_cast<std::size_t>(a)] == cluster_of[static_cast<std::size_t>(c)]) continue;
            const double cosine = std::abs(f.col(a).dot(f.col(c))) / (f.col(a).norm() * f.col(c).norm());
            if (cosine > 1.0 - 1e-8) {
                throw DefectiveSpectrumError("spectral_decompose: merged eigenvalues near " + describe(center[a]) +
                                             ": eigenvectors are numerically parallel");
            }
        }
    }

    Eigen::FullPivLU<MatrixXcd> lu(f);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
        throw DefectiveSpectrumError("spectral_decompose: merged eigenvalues; eigenvector matrix is singular (rcond " +
                                     std::to_string(lu.rcond()) + ")");
    }
    MatrixXcd g = lu.inverse();

    // Clusters whose members turned out to be distinct eigenvalues: diagonalize
    // the projected block and rotate both bases.
    bool rotated = false;
    const MatrixXcd kc = k.cast<Complex>();
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const auto& cols = columns[ci];
        const auto m = static_cast<Index>(cols.size());
        if (m < 2 || (!clusters[ci].real && clusters[ci].center.imag() < 0)) continue;
        MatrixXcd fc(b, m), gc(m, b);
        for (Index j = 0; j < m; ++j) {
            fc.col(j) = f.col(cols[static_cast<std::size_t>(j)]);
            gc.row(j) = g.row(cols[static_cast<std::size_t>(j)]);
        }
        MatrixXcd projected = gc * kc * fc;
        MatrixXcd off = projected;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() <= 1e-10 * scale) continue;
        Eigen::ComplexEigenSolver<MatrixXcd> small(projected);
        const MatrixXcd v = small.eigenvectors();
        fc = fc * v;
        for (Index j = 0; j < m; ++j) f.col(cols[static_cast<std::size_t>(j)]) = fc.col(j);
        rotated = true;
        if (!clusters[ci].real) {
            // Apply the conjugate rotation to the partner block.
            for (std::size_t cj = 0; cj < clusters.size(); ++cj) {
                if (cj == ci || clusters[cj].real || columns[cj].size() != cols.size()) continue;
                if (std::abs(clusters[cj].center - std::conj(clusters[ci].center)) > 1e-9 * scale + 1e-300) continue;
                for (Index j = 0; j < m; ++j) f.col(columns[cj][static_cast<std::size_t>(j)]) = fc.col(j).conjugate();
            }
        }
    }
    if (rotated) {
        Eigen::FullPivLU<MatrixXcd> relu(f);
        if (!relu.isInvertible() || relu.rcond() < 1e-14) {
            throw DefectiveSpectrumError("spectral_decompose: merged eigenvalues; eigenvector matrix is singular");
        }
        g = relu.inverse();
    }

    SpectralData out;
    out.rate = generator.rate();
    out.right = std::move(f);
    out.left = std::move(g);
    out.eigenvalues.resize(b);
    const MatrixXcd gkf = out.left * kc * out.right;
    for (Index j = 0; j < b; ++j) {
        Complex value = gkf(j, j);
        if (clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(j)])].real) value = value.real();
        out.eigenvalues[j] = value;
    }
    // Exact conjugate closure: the lower member of each pair mirrors the upper one.
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        if (clusters[ci].real || clusters[ci].center.imag() > 0) continue;
        for (std::size_t cj = 0; cj < clusters.size(); ++cj) {
            if (clusters[cj].real || clusters[cj].center.imag() <= 0) continue;
            if (columns[cj].size() != columns[ci].size()) continue;
            if (std::abs(clusters[cj].center - std::conj(clusters[ci].center)) > 1e-9 * scale + 1e-300) continue;
            for (std::size_t j = 0; j < columns[ci].size(); ++j)
                out.eigenvalues[columns[ci][j]] = std::conj(out.eigenvalues[columns[cj][j]]);
        }
    }
    // Nearly merged eigenvalues give a basis that no longer reproduces K.
    const double reconstruction =
        (out.right * out.eigenvalues.asDiagonal() * out.left - kc).cwiseAbs().maxCoeff();
    if (!(reconstruction <= 1e-8 * scale)) {
        throw DefectiveSpectrumError("spectral_decompose: merged eigenvalues; eigenvector basis reproduces K only to " +
                                     std::to_string(reconstruction));
    }
    out.zero_mode.resize(static_cast<std::size_t>(b));
    for (Index j = 0; j < b; ++j)
        out.zero_mode[static_cast<std::size_t>(j)] =
            std::abs(out.eigenvalues[j]) <= kZeroModeTolerance * generator.rate();
    return out;
}

std::vector<std::size_t> SpectralData::zero_mode_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < zero_mode.size(); ++j)
        if (zero_mode[j]) out.push_back(j);
    return out;
}

std::vector<std::size_t> SpectralData::order_by_real_part() const {
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Complex x = eigenvalues[static_cast<Index>(a)];
        const Complex y = eigenvalues[static_cast<Index>(b)];
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return idx;
}

MatrixXcd SpectralData::propagator(double t) const {
    const VectorXcd decay = (eigenvalues * t).array().exp().matrix();
    return right * decay.asDiagonal() * left;
}

double SpectralData::biorthogonality_residual() const {
    const auto n = static_cast<Index>(size());
    return (left * right - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double SpectralData::completeness_residual() const {
    const auto n = static_cast<Index>(size());
    return (right * left - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

ZeroModes zero_modes(const SpectralData& spectrum) {
    const auto idx = spectrum.zero_mode_indices();
    const auto b = spectrum.right.rows();
    ZeroModes modes{MatrixXd(b, static_cast<Index>(idx.size())), MatrixXd(static_cast<Index>(idx.size()), b)};
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto col = static_cast<Index>(idx[j]);
        modes.right.col(static_cast<Index>(j)) = spectrum.right.col(col).real();
        modes.left.row(static_cast<Index>(j)) = spectrum.left.row(col).real();
    }
    return modes;
}

namespace {

void check_distribution(const VectorXd& p, Index bins, const char* where) {
    require(p.size() == bins, where, "distribution length does not match the bin count");
    require(p.allFinite() && (p.array() >= 0.0).all(), where, "distribution entries must be >= 0");
    require(std::abs(p.sum() - 1.0) <= 1e-10, where, "distribution must sum to 1 within 1e-10");
}

}  // namespace

VectorXd propagate(const GeneratorMatrix& generator, const VectorXd& initial, double t) {
    check_distribution(initial, static_cast<Index>(generator.bins()), "propagate");
    require(std::isfinite(t) && t >= 0.0, "propagate", "negative time: reverse evolution is undefined");
    if (t == 0.0) return initial;
    return matrix_exponential(generator.entries() * t) * initial;
}

VectorXd limit_distribution(const SpectralData& spectrum, const VectorXd& initial) {
    const auto zero = spectrum.zero_mode_indices();
    require(!zero.empty(), "limit_distribution", "spectrum has no zero mode");
    check_distribution(initial, spectrum.right.rows(), "limit_distribution");
    const double tolerance = kZeroModeTolerance * spectrum.rate;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        if (spectrum.zero_mode[j]) continue;
        const Complex value = spectrum.eigenvalues[static_cast<Index>(j)];
        require(value.real() < -tolerance, "limit_distribution",
                "runaway mode: eigenvalue " + describe(value) + " does not decay");
    }
    VectorXcd total = VectorXcd::Zero(initial.size());
    const VectorXcd p0 = initial.cast<Complex>();
    for (std::size_t j : zero) {
        const auto col = static_cast<Index>(j);
        total += spectrum.right.col(col) * (spectrum.left.row(col) * p0)(0);
    }
    return total.real();
}

namespace {

void check_biorthonormal(const ZeroModes& modes, double tolerance, const char* where) {
    require(modes.left.rows() == modes.right.cols() && modes.left.cols() == modes.right.rows(), where,
            "zero-mode shapes do not match");
    const MatrixXd gram = modes.left * modes.right;
    for (Index m = 0; m < gram.rows(); ++m)
        for (Index n = 0; n < gram.cols(); ++n) {
            const double expected = m == n ? 1.0 : 0.0;
            require(std::abs(gram(m, n) - expected) <= tolerance, where,
                    "modes are not biorthonormal: g_" + std::to_string(m) + " . f_" + std::to_string(n) + " = " +
                        std::to_string(gram(m, n)));
        }
}

}  // namespace

GeneratorMatrix build_equal_gap_kernel(const ZeroModes& modes, double rate, std::size_t bins) {
    require(std::isfinite(rate) && rate > 0.0, "build_equal_gap_kernel", "rate must be > 0");
    require(static_cast<std::size_t>(modes.right.rows()) == bins, "build_equal_gap_kernel",
            "mode length does not match the bin count");
    check_biorthonormal(modes, 1e-10, "build_equal_gap_kernel");
    const auto b = static_cast<Index>(bins);
    MatrixXd k = -rate * (MatrixXd::Identity(b, b) - modes.right * modes.left);
    return GeneratorMatrix(std::move(k), rate);
}

VectorXd closed_form_equal_gap(const VectorXd& initial, double t, const ZeroModes& modes, double rate) {
    require(std::isfinite(rate) && rate > 0.0, "closed_form_equal_gap", "rate must be > 0");
    require(std::isfinite(t) && t >= 0.0, "closed_form_equal_gap", "time must be >= 0");
    check_distribution(initial, modes.right.rows(), "closed_form_equal_gap");
    check_biorthonormal(modes, 1e-10, "closed_form_equal_gap");
    const double survive = std::exp(-rate * t);
    const double settled = -std::expm1(-rate * t);
    const VectorXd limit = modes.right * (modes.left * initial);
    return survive * initial + settled * limit;
}

}  // namespace collapse
