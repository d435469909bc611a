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
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "collapse/scenario.hpp"

namespace collapse::scenario {

namespace {

namespace fs = std::filesystem;

struct TextTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool read_table(const fs::path& path, TextTable& table, std::string& problem) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    if (!in || !std::getline(in, line)) {
        problem = path.string() + ": missing header row";
        return false;
    }
    table.name = path.stem().string();
    table.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.columns.size()) {
            problem = path.string() + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(table.columns.size());
            return false;
        }
        table.rows.push_back(std::move(cells));
    }
    return true;
}

std::string display(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') return cell;
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

void render(const TextTable& table, std::ostream& out) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(table.columns);
    for (const auto& row : table.rows) {
        std::vector<std::string> shown;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (table.columns[c] == "zero_mode")
                shown.push_back(row[c] == "1" ? "zero" : "");
            else
                shown.push_back(display(row[c]));
        }
        cells.push_back(std::move(shown));
    }
    std::vector<std::size_t> width(table.columns.size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    out << "== " << table.name << " ==\n";
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << "  ";
            out << std::string(width[c] - row[c].size(), ' ') << row[c];
        }
        out << '\n';
    }
    out << '\n';
}

bool is_group(const std::string& column) { return column == "row" || column == "col" || column == "sample"; }

// Two-column (x, y) files: x is the first non-grouping column; every other
// numeric column becomes one file per combination of grouping values.
void plot_files(const TextTable& table, std::map<std::string, std::string>& files) {
    std::vector<std::size_t> groups, values;
    std::optional<std::size_t> x;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (is_group(table.columns[c]))
            groups.push_back(c);
        else if (!x)
            x = c;
        else
            values.push_back(c);
    }
    if (!x) return;
    for (const auto& row : table.rows) {
        std::string suffix;
        for (std::size_t g : groups) suffix += "_" + table.columns[g] + row[g];
        for (std::size_t v : values)
            files[table.name + "_" + table.columns[v] + suffix + ".dat"] += row[*x] + " " + row[v] + "\n";
    }
}

}  // namespace

int emit_report(const fs::path& directory, std::ostream& out, std::ostream& err) {
    const fs::path manifest_path = directory / "manifest.json";
    std::error_code ec;
    if (!fs::is_regular_file(manifest_path, ec)) {
        err << "report: no manifest.json in " << directory.string() << "; nothing written\n";
        return 2;
    }
    nlohmann::json manifest;
    try {
        std::ifstream in(manifest_path, std::ios::binary);
        manifest = nlohmann::json::parse(in);
        if (!manifest.contains("scenario") || !manifest["scenario"].is_string())
            throw std::runtime_error("missing 'scenario'");
    } catch (const std::exception& e) {
        err << "report: unreadable manifest " << manifest_path.string() << ": " << e.what() << "; nothing written\n";
        return 2;
    }

    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    std::vector<TextTable> tables;
    std::optional<TextTable> summary;
    for (const fs::path& path : paths) {
        TextTable table;
        std::string problem;
        if (!read_table(path, table, problem)) {
            err << "report: " << problem << "; nothing written\n";
            return 2;
        }
        if (table.name == "summary")
            summary = std::move(table);
        else
            tables.push_back(std::move(table));
    }
    if (!summary) {
        err << "report: no summary.csv in " << directory.string() << "; nothing written\n";
        return 2;
    }

    std::ostringstream text;
    text << "scenario: " << manifest["scenario"].get<std::string>() << '\n';
    if (manifest.contains("seed")) text << "seed: " << manifest["seed"].dump() << '\n';
    if (manifest.contains("version")) text << "version: " << manifest["version"].dump() << "\n";
    text << '\n';
    std::map<std::string, std::string> files;
    for (const TextTable& table : tables) {
        render(table, text);
        plot_files(table, files);
    }
    render(*summary, text);
    std::size_t failed = 0;
    for (const auto& row : summary->rows)
        if (row.back() != "pass") ++failed;
    text << (failed == 0 ? "verdict: all checks passed\n" : "verdict: " + std::to_string(failed) + " check(s) failed\n");

    const fs::path plots = directory / "plots";
    fs::create_directories(plots);
    for (const auto& [name, content] : files) {
        std::ofstream f(plots / name, std::ios::binary | std::ios::trunc);
        f << content;
    }
    std::ofstream(directory / "report.txt", std::ios::binary | std::ios::trunc) << text.str();
    out << text.str();
    return 0;
}

}  // namespace collapse::scenario
