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

#include <cmath>
#include <cstdio>
#include <fstream>

#include "collapse/scenario.hpp"

namespace collapse::scenario {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string render_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw std::filesystem::filesystem_error("cannot write file", path, std::make_error_code(std::errc::io_error));
}

}  // namespace

void write_run(const std::filesystem::path& directory, const RunResult& result) {
    std::filesystem::create_directories(directory);
    write_file(directory / "manifest.json", result.manifest.dump(2) + "\n");
    for (const Table& table : result.tables) write_file(directory / (table.name + ".csv"), render_csv(table));
    std::string summary = "check,value,threshold,verdict\n";
    for (const Check& c : result.checks)
        summary += c.name + "," + format_number(c.value) + "," + format_number(c.threshold) + "," +
                   (c.pass ? "pass" : "fail") + "\n";
    write_file(directory / "summary.csv", summary);
}

}  // namespace collapse::scenario
