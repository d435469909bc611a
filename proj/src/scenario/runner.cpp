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

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "collapse/born.hpp"
#include "collapse/density.hpp"
#include "collapse/error.hpp"
#include "collapse/expm.hpp"
#include "collapse/grw.hpp"
#include "collapse/jump.hpp"
#include "collapse/markov.hpp"
#include "collapse/random.hpp"
#include "collapse/scenario.hpp"
#include "section.hpp"

#ifndef COLLAPSE_LAB_VERSION
#define COLLAPSE_LAB_VERSION "unknown"
#endif

namespace collapse::scenario {

using detail::Section;
using nlohmann::json;

bool RunResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

constexpr std::uint64_t kChainSalt = 0x6368'6169'6eull;
constexpr std::uint64_t kSampleSalt = 0x7361'6d70'6c65ull;

// -- shared parsing --------------------------------------------------------

struct ModelSpec {
    JumpModel model;
    SectorMap sectors;
};

ModelSpec read_model(Section s) {
    const auto dimension = static_cast<std::size_t>(s.integer("dimension"));
    std::vector<double> profile;
    if (s.has("profile_squared")) {
        if (s.has("profile")) throw InputError("field '" + s.path() + "': give profile or profile_squared, not both");
        profile = s.numbers("profile_squared");
        for (double& v : profile) {
            require(std::isfinite(v) && v >= 0.0, "make_bell_jump", "profile entries must be finite and >= 0");
            v = std::sqrt(v);
        }
    } else {
        profile = s.numbers("profile");
    }
    const double rate = s.number("rate");
    std::optional<SectorMap> sectors;
    if (s.has("sector_sizes")) {
        std::vector<std::size_t> sizes;
        for (double v : s.numbers("sector_sizes")) {
            if (v < 0.0 || v != std::floor(v)) throw InputError("field '" + s.path() + ".sector_sizes': expected integers");
            sizes.push_back(static_cast<std::size_t>(v));
        }
        sectors = SectorMap::blocks(sizes);
        require(sectors->dimension() == dimension, "SectorMap.blocks", "sector sizes must add up to the dimension");
    }
    s.finish();
    if (sectors) return {make_sector_jump(*sectors, profile, rate), *sectors};
    require(dimension >= 1, "make_bell_jump", "dimension must be at least 1");
    return {make_bell_jump(dimension, profile, rate), SectorMap::singletons(dimension)};
}

StateVector read_state(Section& s) {
    StateVector psi = [&] {
        if (s.has("probabilities")) {
            if (s.has("amplitudes")) throw InputError("field '" + s.path() + "': give amplitudes or probabilities, not both");
            const std::vector<double> p = s.numbers("probabilities");
            Amplitudes a(static_cast<Eigen::Index>(p.size()));
            for (std::size_t k = 0; k < p.size(); ++k) {
                require(std::isfinite(p[k]) && p[k] >= 0.0, "normalize", "probabilities must be finite and >= 0");
                a[static_cast<Eigen::Index>(k)] = std::sqrt(p[k]);
            }
            return normalize(a);
        }
        return normalize(s.amplitudes("amplitudes"));
    }();
    return psi;
}

StateVector read_initial(Section s) {
    StateVector psi = read_state(s);
    s.finish();
    return psi;
}

Ensemble read_decomposition(std::vector<Section> members, std::uint64_t seed, const char* where) {
    require(!members.empty(), where, "decomposition must have at least one member");
    std::vector<Member> out;
    for (Section& m : members) {
        const double weight = m.number("weight");
        StateVector psi = read_state(m);
        m.finish();
        out.push_back({std::move(psi), weight});
    }
    return Ensemble(std::move(out), seed);
}

void require_times(const std::vector<double>& times, const char* where, bool strict) {
    require(!times.empty(), where, "at least one time is required");
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(std::isfinite(times[k]) && times[k] >= 0.0, where, "times must be finite and >= 0");
        if (k > 0)
            require(strict ? times[k] > times[k - 1] : times[k] >= times[k - 1], where,
                    strict ? "times must be strictly increasing" : "times must be nondecreasing");
    }
}

std::size_t require_count(std::uint64_t value, std::uint64_t minimum, const char* where, const char* what) {
    require(value >= minimum, where, std::string(what) + " must be at least " + std::to_string(minimum));
    return static_cast<std::size_t>(value);
}

Check band_check(std::string name, double worst_z, bool pass) { return {std::move(name), worst_z, 3.0, pass}; }

Check at_most(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value <= threshold};
}

Table eigenvalue_table(const SpectralData& spectrum) {
    Table t{"eigenvalues", {"rank", "real", "imag", "zero_mode"}, {}};
    std::size_t rank = 0;
    for (std::size_t k : spectrum.order_by_real_part()) {
        const Complex v = spectrum.eigenvalues[static_cast<Eigen::Index>(k)];
        t.rows.push_back({static_cast<double>(rank++), v.real(), v.imag(), spectrum.zero_mode[k] ? 1.0 : 0.0});
    }
    return t;
}

// A job is the validated scenario; calling it performs the computation.
using Job = std::function<void(RunResult&)>;

// -- collapse --------------------------------------------------------------

Job prepare_collapse(Section& body, const Config& config) {
    ModelSpec spec = read_model(body.section("model"));
    StateVector psi = read_initial(body.section("initial"));
    const std::size_t n = require_count(body.integer("trajectories", 1000), 1, "Ensemble", "trajectory count");
    const std::vector<double> times = body.numbers("times", {0.0, 1.0, 5.0, 10.0});
    require_times(times, "evolve_ensemble", false);
    const double epsilon = body.number("epsilon", 1e-9);
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0, "collapse_statistics", "epsilon must lie in (0, 1)");
    const auto bins = require_count(body.integer("phase_bins", kDefaultPhaseBins), 1, "phase_profile", "bin count");
    require(psi.dimension() == spec.model.dimension(), "evolve_ensemble", "initial state dimension does not match the model");

    return [=, seed = config.seed, workers = config.workers](RunResult& result) {
        const SectorMap& sectors = spec.sectors;
        const std::size_t s = sectors.sector_count();
        std::vector<double> exact(s);
        for (std::size_t k = 0; k < s; ++k) exact[k] = sector_weight(psi, sectors, k);

        Ensemble ensemble = Ensemble::replicate(psi, n, seed);
        BornRecord record;
        double now = 0.0;
        for (double t : times) {
            if (t > now) {
                ensemble = evolve_ensemble(ensemble, spec.model, t - now, workers);
                now = t;
            }
            record.append(t, born_probabilities(ensemble, sectors));
        }

        Table born{"born", {"time"}, {}};
        for (std::size_t k = 0; k < s; ++k) {
            born.columns.push_back("P" + std::to_string(k));
            born.columns.push_back("P" + std::to_string(k) + "_error");
        }
        double worst = 0.0;
        bool steady = true;
        for (std::size_t r = 0; r < record.times.size(); ++r) {
            std::vector<double> row{record.times[r]};
            for (std::size_t k = 0; k < s; ++k) {
                const double value = record.estimates[r].values[k];
                const double error = record.estimates[r].errors[k];
                row.push_back(value);
                row.push_back(error);
                const double deviation = std::abs(value - exact[k]);
                worst = std::max(worst, band_z(deviation, error));
                if (deviation > 3.0 * error + kBandFloor) steady = false;
            }
            born.rows.push_back(std::move(row));
        }
        result.tables.push_back(std::move(born));
        result.checks.push_back(band_check("born_probability_constant", worst, steady));
        result.checks.push_back(at_most("born_normalization", record.normalization_residual(), 1e-12));

        const CollapseStatistics stats = collapse_statistics(ensemble, sectors, epsilon);
        Table collapsed{"collapse", {"sector", "fraction", "expected", "tolerance"}, {}};
        for (std::size_t k = 0; k < s; ++k) {
            const double tolerance = 3.0 * std::sqrt(exact[k] * (1.0 - exact[k]) / static_cast<double>(n)) + kBandFloor;
            const double gap = std::abs(stats.fractions[k] - exact[k]);
            collapsed.rows.push_back({static_cast<double>(k), stats.fractions[k], exact[k], tolerance});
            result.checks.push_back(at_most("collapse_fraction_sector_" + std::to_string(k), gap, tolerance));
        }
        collapsed.rows.push_back({-1.0, stats.remainder, 0.0, 0.0});
        result.tables.push_back(std::move(collapsed));

        Table phase{"phase", {"angle"}, {}};
        std::vector<PhaseHistogram> histograms;
        for (std::size_t k = 0; k < s; ++k) {
            phase.columns.push_back("mass" + std::to_string(k));
            histograms.push_back(phase_profile(ensemble, sectors, k, epsilon, bins));
        }
        const double width = histograms.front().bin_width();
        for (std::size_t b = 0; b < bins; ++b) {
            std::vector<double> row{(static_cast<double>(b) + 0.5) * width};
            for (const PhaseHistogram& h : histograms) row.push_back(h.mass[b]);
            phase.rows.push_back(std::move(row));
        }
        result.tables.push_back(std::move(phase));
    };
}

// -- spectral --------------------------------------------------------------

struct ChainMetrics {
    double column_sum = 0.0;
    double left_null = 0.0;
    double biorthogonality = 0.0;
    double completeness = 0.0;
    double reconstruction = 0.0;
    double max_real = -INFINITY;
    double conjugation = 0.0;
};

ChainMetrics chain_metrics(const GeneratorMatrix& generator, const std::vector<double>& times) {
    ChainMetrics m;
    const Eigen::MatrixXd& k = generator.entries();
    m.column_sum = generator.column_sum_residual();
    const std::vector<double> nodes = generator.nodes();
    Eigen::VectorXd p(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) p[static_cast<Eigen::Index>(i)] = nodes[i];
    const Eigen::VectorXd q = Eigen::VectorXd::Ones(p.size()) - p;
    m.left_null = std::max((k.transpose() * p).cwiseAbs().maxCoeff(), (k.transpose() * q).cwiseAbs().maxCoeff());

    const SpectralData spectrum = spectral_decompose(generator);
    m.biorthogonality = spectrum.biorthogonality_residual();
    m.completeness = spectrum.completeness_residual();
    for (double t : times) {
        const Eigen::MatrixXd reference = matrix_exponential(k * t);
        m.reconstruction = std::max(m.reconstruction, (spectrum.propagator(t) - reference.cast<Complex>()).cwiseAbs().maxCoeff());
    }
    const double scale = std::max(1.0, generator.rate());
    for (Eigen::Index a = 0; a < spectrum.eigenvalues.size(); ++a) {
        const Complex v = spectrum.eigenvalues[a];
        m.max_real = std::max(m.max_real, v.real());
        double nearest = INFINITY;
        for (Eigen::Index b = 0; b < spectrum.eigenvalues.size(); ++b)
            nearest = std::min(nearest, std::abs(spectrum.eigenvalues[b] - std::conj(v)));
        m.conjugation = std::max(m.conjugation, nearest / scale);
    }
    return m;
}

Job prepare_spectral(Section& body, const Config& config) {
    ModelSpec spec = read_model(body.section("model"));
    const JumpChain chain = reduce_qubit_model(spec.model);
    const std::size_t bins = static_cast<std::size_t>(body.integer("bins", 101));
    require(bins >= 3, "build_generator", "bin count must be at least 3 (got " + std::to_string(bins) + ")");
    const std::vector<double> times = body.numbers("times", {0.1, 1.0, 10.0});
    require_times(times, "propagate", false);
    const std::vector<double> steps = body.numbers("steps", {1e-2, 1e-3});
    require(steps.size() >= 2, "jump_transition_matrix", "at least two time steps are required");
    for (std::size_t k = 0; k < steps.size(); ++k) {
        require(std::isfinite(steps[k]) && steps[k] > 0.0, "jump_transition_matrix", "time steps must be > 0");
        require(chain.rate() * steps[k] <= 50.0, "jump_transition_matrix", "rate * dt must not exceed 50");
        if (k > 0) require(steps[k] < steps[k - 1], "jump_transition_matrix", "time steps must be decreasing");
    }
    const std::size_t random_chains = static_cast<std::size_t>(body.integer("random_chains", 0));

    return [=, seed = config.seed](RunResult& result) {
        std::vector<JumpChain> chains{chain};
        RandomStream rng(derive_seed(seed, kChainSalt), 0);
        for (std::size_t c = 0; c < random_chains; ++c) {
            const double c2 = rng.uniform();
            const std::vector<double> profile{std::sqrt(c2), std::sqrt(1.0 - c2)};
            chains.push_back(reduce_qubit_model(make_bell_jump(2, profile, chain.rate())));
        }

        Table table{"chains",
                    {"chain", "w00", "w01", "column_sum", "left_null", "biorthogonality", "completeness",
                     "reconstruction", "max_real", "conjugation"},
                    {}};
        ChainMetrics worst;
        bool decomposed = true;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            const GeneratorMatrix generator = build_generator(chains[c], bins);
            ChainMetrics m;
            try {
                if (c == 0) result.tables.push_back(eigenvalue_table(spectral_decompose(generator)));
                m = chain_metrics(generator, times);
            } catch (const DefectiveSpectrumError&) {
                decomposed = false;
                m.biorthogonality = m.completeness = m.reconstruction = m.conjugation = INFINITY;
                m.max_real = INFINITY;
            }
            table.rows.push_back({static_cast<double>(c), chains[c].squared_weights()(0, 0),
                                  chains[c].squared_weights()(0, 1), m.column_sum, m.left_null, m.biorthogonality,
                                  m.completeness, m.reconstruction, m.max_real, m.conjugation});
            worst.column_sum = std::max(worst.column_sum, m.column_sum);
            worst.left_null = std::max(worst.left_null, m.left_null);
            worst.biorthogonality = std::max(worst.biorthogonality, m.biorthogonality);
            worst.completeness = std::max(worst.completeness, m.completeness);
            worst.reconstruction = std::max(worst.reconstruction, m.reconstruction);
            worst.max_real = std::max(worst.max_real, m.max_real);
            worst.conjugation = std::max(worst.conjugation, m.conjugation);
        }
        result.tables.push_back(std::move(table));
        const double scale = std::max(1.0, chain.rate());
        result.checks.push_back({"spectrum_diagonalizable", decomposed ? 1.0 : 0.0, 1.0, decomposed});
        result.checks.push_back(at_most("generator_column_sums", worst.column_sum, 1e-12 * scale));
        result.checks.push_back(at_most("left_null_p_and_1_minus_p", worst.left_null, 1e-12 * scale));
        result.checks.push_back(at_most("biorthogonality", worst.biorthogonality, 1e-8));
        result.checks.push_back(at_most("completeness", worst.completeness, 1e-8));
        result.checks.push_back(at_most("propagator_reconstruction", worst.reconstruction, 1e-8));
        result.checks.push_back(at_most("decay_rates_nonnegative", worst.max_real, 1e-10 * scale));
        result.checks.push_back(at_most("spectrum_conjugation_closed", worst.conjugation, 1e-8));

        // First-order convergence of the one-step transition matrix.
        const Eigen::MatrixXd k = build_generator(chain, bins).entries();
        Table fd{"finite_difference", {"step", "error"}, {}};
        std::vector<double> errors;
        for (double dt : steps) {
            const Eigen::MatrixXd pi = jump_transition_matrix(chain, bins, dt);
            const Eigen::MatrixXd estimate = (pi - Eigen::MatrixXd::Identity(k.rows(), k.cols())) / dt;
            errors.push_back((estimate - k).cwiseAbs().maxCoeff());
            fd.rows.push_back({dt, errors.back()});
        }
        result.tables.push_back(std::move(fd));
        for (std::size_t i = 1; i < steps.size(); ++i) {
            const double expected = steps[i - 1] / steps[i];
            const double ratio = errors[i - 1] / errors[i];
            const bool pass = std::isfinite(ratio) && ratio >= expected / 2.0 && ratio <= expected * 2.0;
            result.checks.push_back({"finite_difference_ratio_" + std::to_string(i), ratio, expected, pass});
        }
    };
}

// -- equal-gap -------------------------------------------------------------

Eigen::VectorXd random_distribution(RandomStream& rng, std::size_t bins) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(bins));
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.exponential(1.0);
    return p / p.sum();
}

Job prepare_equal_gap(Section& body, const Config& config) {
    const double rate = body.number("rate", 1.0);
    validate_rate(rate);
    const std::size_t bins = static_cast<std::size_t>(body.integer("bins", 101));
    require(bins >= 3, "build_generator", "bin count must be at least 3 (got " + std::to_string(bins) + ")");
    const std::size_t samples = require_count(body.integer("samples", 10), 1, "closed_form_equal_gap", "sample count");
    const std::vector<double> times = body.numbers("times", {0.1, 1.0, 10.0});
    require_times(times, "closed_form_equal_gap", false);

    return [=, seed = config.seed](RunResult& result) {
        const std::vector<double> one_hot{1.0, 0.0};
        const JumpChain chain = reduce_qubit_model(make_bell_jump(2, one_hot, rate));
        const GeneratorMatrix generator = build_generator(chain, bins);
        const SpectralData spectrum = spectral_decompose(generator);
        result.tables.push_back(eigenvalue_table(spectrum));

        // Expected spectrum: 0 twice, -rate for every other mode.
        std::vector<Complex> values(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
        std::sort(values.begin(), values.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
        double spectrum_error = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double target = k < 2 ? 0.0 : -rate;
            spectrum_error = std::max(spectrum_error, std::abs(values[k] - Complex(target, 0.0)));
        }
        result.checks.push_back(at_most("equal_gap_spectrum", spectrum_error, 1e-8 * std::max(1.0, rate)));
        result.checks.push_back({"zero_mode_count", static_cast<double>(spectrum.zero_mode_indices().size()), 2.0,
                                 spectrum.zero_mode_indices().size() == 2});

        const ZeroModes modes = zero_modes(spectrum);
        const GeneratorMatrix rebuilt = build_equal_gap_kernel(modes, rate, bins);
        result.checks.push_back(at_most("kernel_from_zero_modes",
                                        (rebuilt.entries() - generator.entries()).cwiseAbs().maxCoeff(),
                                        1e-8 * std::max(1.0, rate)));

        RandomStream rng(derive_seed(seed, kSampleSalt), 0);
        Table table{"equal_gap", {"sample", "time", "max_abs_difference"}, {}};
        double worst = 0.0;
        double limit_gap = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const Eigen::VectorXd p0 = random_distribution(rng, bins);
            for (double t : times) {
                const double gap = (closed_form_equal_gap(p0, t, modes, rate) - propagate(generator, p0, t)).cwiseAbs().maxCoeff();
                worst = std::max(worst, gap);
                table.rows.push_back({static_cast<double>(s), t, gap});
            }
            const Eigen::VectorXd limit = limit_distribution(spectrum, p0);
            Eigen::VectorXd expected = Eigen::VectorXd::Zero(p0.size());
            const std::vector<double> nodes = generator.nodes();
            double mean = 0.0;
            for (Eigen::Index i = 0; i < p0.size(); ++i) mean += p0[i] * nodes[static_cast<std::size_t>(i)];
            expected[0] = 1.0 - mean;
            expected[p0.size() - 1] = mean;
            limit_gap = std::max(limit_gap, (limit - expected).cwiseAbs().maxCoeff());
        }
        result.tables.push_back(std::move(table));
        result.checks.push_back(at_most("closed_form_vs_propagate", worst, 1e-8));
        result.checks.push_back(at_most("born_limit_distribution", limit_gap, 1e-8));
    };
}

// -- density ---------------------------------------------------------------

Job prepare_density(Section& body, const Config& config) {
    ModelSpec spec = read_model(body.section("model"));
    Ensemble decomposition = read_decomposition(body.sections("decomposition"), config.seed, "compare_mc_density");
    require(decomposition.dimension() == spec.model.dimension(), "compare_mc_density", "dimension mismatch");
    const std::size_t n = require_count(body.integer("trajectories", 1000), 1, "compare_mc_density", "trajectories per member");
    const std::vector<double> times = body.numbers("times", {0.0, 0.5, 1.0, 2.0});
    require_times(times, "compare_mc_density", false);

    return [=, seed = config.seed, workers = config.workers](RunResult& result) {
        double lift = 0.0;
        for (const Member& m : decomposition.members()) lift = std::max(lift, lift_residual(spec.model, m.state));
        result.checks.push_back(at_most("lift_condition", lift, 1e-12));

        const auto comparisons = compare_mc_density(spec.model, decomposition, times, {n, seed, workers});
        Table table{"density", {"time", "row", "col", "mc_re", "mc_im", "analytic_re", "analytic_im", "sigma"}, {}};
        double worst = 0.0, worst_diagonal = 0.0;
        bool band = true, diagonal = true;
        for (const DensityComparison& c : comparisons) {
            for (Eigen::Index i = 0; i < c.analytic.rows(); ++i)
                for (Eigen::Index j = 0; j < c.analytic.cols(); ++j) {
                    table.rows.push_back({c.time, static_cast<double>(i), static_cast<double>(j), c.monte_carlo(i, j).real(),
                                          c.monte_carlo(i, j).imag(), c.analytic(i, j).real(), c.analytic(i, j).imag(),
                                          c.error(i, j)});
                    if (i != j) continue;
                    const double deviation = std::abs(c.monte_carlo(i, i) - c.analytic(i, i));
                    worst_diagonal = std::max(worst_diagonal, band_z(deviation, c.error(i, i)));
                    if (deviation > 3.0 * c.error(i, i) + kBandFloor) diagonal = false;
                }
            worst = std::max(worst, c.max_z);
            band = band && c.within_band;
        }
        result.tables.push_back(std::move(table));
        result.checks.push_back(band_check("density_matches_linear_evolution", worst, band));
        result.checks.push_back(band_check("diagonal_drift", worst_diagonal, diagonal));
    };
}

// -- gisin -----------------------------------------------------------------

Table distance_table(const DistanceReport& report) {
    Table t{"distance", {"time", "row", "col", "distance", "sigma"}, {}};
    for (const DistancePoint& p : report.points)
        for (Eigen::Index i = 0; i < p.distance.rows(); ++i)
            for (Eigen::Index j = 0; j < p.distance.cols(); ++j)
                t.rows.push_back({p.time, static_cast<double>(i), static_cast<double>(j), p.distance(i, j), p.sigma(i, j)});
    return t;
}

Job prepare_gisin(Section& body, const Config& config) {
    ModelSpec spec = read_model(body.section("model"));
    std::vector<Section> pair = body.sections("decompositions");
    if (pair.size() != 2) throw InputError("field 'decompositions': expected exactly two decompositions");
    std::vector<Ensemble> sides;
    for (std::size_t k = 0; k < 2; ++k) {
        Section& side = pair[k];
        sides.push_back(read_decomposition(side.sections("members"), config.seed, "gisin_experiment"));
        side.finish();
        require(sides.back().dimension() == spec.model.dimension(), "gisin_experiment", "dimension mismatch");
    }
    const double gap = (ensemble_density(sides[0]).entries() - ensemble_density(sides[1]).entries()).cwiseAbs().maxCoeff();
    require(gap <= 1e-10, "gisin_experiment", "decompositions must describe the same density matrix");
    std::optional<Ensemble> control;
    if (body.has("control")) {
        control = read_decomposition(body.sections("control"), config.seed, "ensemble_distance");
        require(control->dimension() == spec.model.dimension(), "ensemble_distance", "dimension mismatch");
    }
    const std::size_t n = require_count(body.integer("trajectories", 1000), 1, "gisin_experiment", "trajectories per member");
    const std::vector<double> times = body.numbers("times", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
    require_times(times, "gisin_experiment", false);

    return [=, seed = config.seed, workers = config.workers](RunResult& result) {
        const MonteCarloOptions options{n, seed, workers};
        const DistanceReport report = gisin_experiment(sides[0], sides[1], spec.model, times, options);
        double worst = 0.0;
        for (const DistancePoint& p : report.points) worst = std::max(worst, p.max_z);
        result.tables.push_back(distance_table(report));
        result.checks.push_back(band_check("decompositions_indistinguishable", worst, report.indistinguishable));
        if (control) {
            const std::vector<double> start{0.0};
            const DistanceReport negative = ensemble_distance(sides[0], *control, spec.model, start, options);
            const DistancePoint& p = negative.points.front();
            Table t = distance_table(negative);
            t.name = "control";
            result.tables.push_back(std::move(t));
            result.checks.push_back({"negative_control_separated", p.max_z, 3.0, !p.within_band});
        }
    };
}

// -- grw -------------------------------------------------------------------

Job prepare_grw(Section& body, const Config& config) {
    GrwGrid grid;
    {
        Section g = body.section("grid");
        grid.points = static_cast<std::size_t>(g.integer("points", 128));
        grid.spacing = g.number("spacing", 0.25);
        grid.alpha = g.number("alpha", 1.0);
        grid.omega = g.number("omega", 1.0);
        g.finish();
    }
    grid.validate();
    validate_rate(grid.omega);
    double center = 0.0, width = 0.0;
    {
        Section p = body.section("packet");
        center = p.number("center", grid.length() / 2.0);
        width = p.number("width", 4.0);
        p.finish();
    }
    const StateVector psi = gaussian_packet(grid, center, width);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (double separation : body.numbers("separations", {1.0, 2.0})) pairs.push_back(centered_pair(grid, center, separation));
    const std::size_t n = require_count(body.integer("trajectories", 2000), 2, "measure_localization", "trajectory count");
    const std::vector<double> times = body.numbers("times", {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});
    require_times(times, "measure_localization", true);
    const std::size_t bins = static_cast<std::size_t>(body.integer("histogram_bins", 8));
    require(bins >= 1 && grid.points % bins == 0, "measure_localization",
            "histogram bin count must divide the number of grid points");
    const double tolerance = body.number("rate_tolerance", 0.1);
    require(std::isfinite(tolerance) && tolerance > 0.0, "measure_localization", "rate tolerance must be > 0");

    return [=, seed = config.seed, workers = config.workers](RunResult& result) {
        const JumpModel model = make_grw_model(grid);
        double overlap_error = 0.0;
        const double window = 4.0 / std::sqrt(grid.alpha);
        for (std::size_t k = 0; k < grid.points; ++k) {
            const double x = static_cast<double>(grid.ring_offset(0, k)) * grid.spacing;
            if (std::abs(x) > window) continue;
            const double exact = std::exp(-grid.alpha * x * x / 2.0);
            overlap_error = std::max(overlap_error, std::abs(model.overlap()(0, static_cast<Eigen::Index>(k)) - exact));
        }
        result.checks.push_back(at_most("overlap_matches_gaussian", overlap_error, 1e-6));

        const LocalizationReport report = measure_localization(psi, grid, times, pairs, {n, seed, workers, bins});

        Table fits{"fits",
                   {"separation", "first", "second", "fitted_rate", "rate_error", "analytic_rate", "ratio", "fittable",
                    "points_used"},
                   {}};
        Table offdiag{"offdiagonal", {"time"}, {}};
        for (const PairFit& f : report.pairs) {
            const double ratio = f.fittable ? f.fitted_rate / f.analytic_rate : NAN;
            fits.rows.push_back({f.separation, static_cast<double>(f.first), static_cast<double>(f.second), f.fitted_rate,
                                 f.rate_error, f.analytic_rate, ratio, f.fittable ? 1.0 : 0.0,
                                 static_cast<double>(f.points_used)});
            const std::string label = format_number(f.separation);
            offdiag.columns.push_back("magnitude_" + label);
            offdiag.columns.push_back("noise_" + label);
            const double gap = f.fittable ? std::abs(ratio - 1.0) : INFINITY;
            result.checks.push_back(at_most("decay_rate_separation_" + label, gap, tolerance));
        }
        for (std::size_t t = 0; t < times.size(); ++t) {
            std::vector<double> row{times[t]};
            for (const PairFit& f : report.pairs) {
                row.push_back(f.magnitude[t]);
                row.push_back(f.noise[t]);
            }
            offdiag.rows.push_back(std::move(row));
        }
        result.tables.push_back(std::move(fits));
        result.tables.push_back(std::move(offdiag));

        Table histogram{"histogram", {"time"}, {}};
        for (std::size_t b = 0; b < bins; ++b) {
            histogram.columns.push_back("bin" + std::to_string(b));
            histogram.columns.push_back("bin" + std::to_string(b) + "_error");
        }
        for (std::size_t t = 0; t < times.size(); ++t) {
            std::vector<double> row{times[t]};
            for (std::size_t b = 0; b < bins; ++b) {
                row.push_back(report.histogram[t][b]);
                row.push_back(report.histogram_error[t][b]);
            }
            histogram.rows.push_back(std::move(row));
        }
        result.tables.push_back(std::move(histogram));
        double worst = 0.0;
        for (double z : report.histogram_max_z) worst = std::max(worst, z);
        result.checks.push_back(band_check("position_histogram_constant", worst, report.histogram_stable));

        Table ipr{"ipr", {"time", "mean", "error"}, {}};
        for (std::size_t t = 0; t < times.size(); ++t) ipr.rows.push_back({times[t], report.ipr_mean[t], report.ipr_error[t]});
        result.tables.push_back(std::move(ipr));
        if (times.size() >= 2) {
            const double growth = report.ipr_mean.back() - report.ipr_mean.front();
            const double margin = 3.0 * std::hypot(report.ipr_error.back(), report.ipr_error.front());
            result.checks.push_back({"participation_ratio_grows", growth, margin, growth > margin});
        }
    };
}

}  // namespace

RunResult run_scenario(const Config& config) {
    require(config.workers >= 1, "evolve_ensemble", "worker count must be at least 1");
    json resolved = json::object();
    Section body(config.body, resolved, "");
    Job job;
    switch (config.kind) {
        case Kind::collapse: job = prepare_collapse(body, config); break;
        case Kind::spectral: job = prepare_spectral(body, config); break;
        case Kind::equal_gap: job = prepare_equal_gap(body, config); break;
        case Kind::density: job = prepare_density(body, config); break;
        case Kind::gisin: job = prepare_gisin(body, config); break;
        case Kind::grw: job = prepare_grw(body, config); break;
    }
    body.finish();

    RunResult result;
    result.kind = config.kind;
    result.manifest = json::object();
    result.manifest["scenario"] = std::string(kind_name(config.kind));
    result.manifest["seed"] = config.seed;
    result.manifest["version"] = COLLAPSE_LAB_VERSION;
    result.manifest["config"] = resolved;
    job(result);
    return result;
}

}  // namespace collapse::scenario
