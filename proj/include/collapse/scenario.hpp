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
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace collapse::scenario {

/// Unreadable or malformed configuration (exit code 2).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Kind { collapse, spectral, equal_gap, density, gisin, grw };

std::string_view kind_name(Kind kind) noexcept;

struct Config {
    Kind kind = Kind::collapse;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string output = "collapse_lab_out";
    /// Scenario section as given; defaults are filled in by run_scenario.
    nlohmann::json body;
};

/// Parses a JSON scenario file. Throws InputError with line:column or the
/// offending field path.
Config parse_config(std::string_view text, std::string_view source = "<config>");
Config load_config(const std::filesystem::path& path);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct RunResult {
    Kind kind = Kind::collapse;
    /// Resolved configuration, seed and code version. Worker count and
    /// output location are left out so that they cannot change any byte.
    nlohmann::json manifest;
    std::vector<Table> tables;
    std::vector<Check> checks;

    bool passed() const;
};

/// Resolves defaults and validates every module precondition, then runs.
/// Throws InputError for schema problems and PreconditionError for values
/// rejected by a module, both before any simulation work.
RunResult run_scenario(const Config& config);

/// "%.17g" formatting; the only number format used in emitted files.
std::string format_number(double value);
std::string render_csv(const Table& table);

/// Writes manifest.json, one CSV per table and summary.csv, sequentially.
void write_run(const std::filesystem::path& directory, const RunResult& result);

/// Renders report.txt and two-column .dat files for a finished run. Returns
/// 0 on success and 2 when the directory holds no readable manifest, in
/// which case nothing is written.
int emit_report(const std::filesystem::path& directory, std::ostream& out, std::ostream& err);

/// Entry point behind the collapse_lab executable.
/// Exit codes: 0 pass, 1 failed check, 2 input error, 3 precondition error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace collapse::scenario
