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

#include <CLI11.hpp>
#include <optional>
#include <ostream>

#include "collapse/error.hpp"
#include "collapse/scenario.hpp"

#ifndef COLLAPSE_LAB_VERSION
#define COLLAPSE_LAB_VERSION "unknown"
#endif

namespace collapse::scenario {

namespace {

int run_command(const std::string& path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::size_t>& workers, const std::optional<std::string>& output,
                std::ostream& out, std::ostream& err) {
    try {
        Config config = load_config(path);
        if (seed) config.seed = *seed;
        if (workers) config.workers = *workers;
        if (output) config.output = *output;
        const RunResult result = run_scenario(config);
        write_run(config.output, result);
        for (const Check& c : result.checks)
            out << (c.pass ? "pass  " : "FAIL  ") << c.name << "  value=" << format_number(c.value)
                << "  threshold=" << format_number(c.threshold) << '\n';
        if (!result.passed()) {
            for (const Check& c : result.checks)
                if (!c.pass) err << "criterion failed: " << c.name << '\n';
            return 1;
        }
        return 0;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "precondition failed in " << e.where() << ": " << e.what() << '\n';
        return 3;
    } catch (const DefectiveSpectrumError& e) {
        err << "criterion failed: spectral decomposition: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "criterion failed: numerical check: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and verification runs for stochastic collapse models", "collapse_lab"};
    app.set_version_flag("--version", COLLAPSE_LAB_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> output;
    CLI::App* run = app.add_subcommand("run", "Run the scenario described by a JSON config file");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--workers", workers, "Worker threads (does not change any output byte)");
    run->add_option("--out", output, "Output directory (overrides the config)");

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "Render a human-readable report for a run directory");
    report->add_option("dir", report_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    if (run->parsed()) return run_command(config_path, seed, workers, output, out, err);
    return emit_report(report_dir, out, err);
}

}  // namespace collapse::scenario
