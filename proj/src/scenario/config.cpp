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

#include <fstream>
#include <sstream>

#include "collapse/error.hpp"
#include "collapse/scenario.hpp"
#include "section.hpp"

namespace collapse::scenario {

using nlohmann::json;

std::string_view kind_name(Kind kind) noexcept {
    switch (kind) {
        case Kind::collapse: return "collapse";
        case Kind::spectral: return "spectral";
        case Kind::equal_gap: return "equal-gap";
        case Kind::density: return "density";
        case Kind::gisin: return "gisin";
        case Kind::grw: return "grw";
    }
    return "unknown";
}

namespace {

std::string location(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return std::to_string(line) + ":" + std::to_string(column);
}

}  // namespace

Config parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte is one past the offending character
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw InputError(std::string(source) + ":" + location(text, byte) + ": parse error: " + e.what());
    }
    const std::string where(source);
    if (!root.is_object()) throw InputError(where + ": top level must be an object");

    Config config;
    const auto scenario = root.find("scenario");
    if (scenario == root.end() || !scenario->is_string())
        throw InputError(where + ": field 'scenario': required string");
    const std::string name = scenario->get<std::string>();
    bool known = false;
    for (Kind k : {Kind::collapse, Kind::spectral, Kind::equal_gap, Kind::density, Kind::gisin, Kind::grw}) {
        if (kind_name(k) == name) {
            config.kind = k;
            known = true;
        }
    }
    if (!known)
        throw InputError(where + ": field 'scenario': unknown kind '" + name +
                         "' (expected collapse, spectral, equal-gap, density, gisin or grw)");

    if (const auto seed = root.find("seed"); seed != root.end()) {
        if (!seed->is_number_unsigned()) throw InputError(where + ": field 'seed': expected a nonnegative integer");
        config.seed = seed->get<std::uint64_t>();
    }
    if (const auto workers = root.find("workers"); workers != root.end()) {
        if (!workers->is_number_unsigned()) throw InputError(where + ": field 'workers': expected a positive integer");
        config.workers = workers->get<std::size_t>();
        require(config.workers >= 1, "evolve_ensemble", "worker count must be at least 1");
    }
    if (const auto output = root.find("output"); output != root.end()) {
        if (!output->is_string()) throw InputError(where + ": field 'output': expected a string");
        config.output = output->get<std::string>();
    }
    config.body = json::object();
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (it.key() == "scenario" || it.key() == "seed" || it.key() == "workers" || it.key() == "output") continue;
        config.body[it.key()] = it.value();
    }
    return config;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open configuration file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

namespace detail {

Section::Section(const json& node, json& resolved, std::string path)
    : node_(&node), resolved_(&resolved), path_(std::move(path)) {
    if (!node.is_object()) throw InputError("field '" + path_ + "': expected an object");
    if (!resolved_->is_object()) *resolved_ = json::object();
}

std::string Section::field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

bool Section::has(const char* key) const { return node_->contains(key); }

const json& Section::lookup(const char* key) const {
    const auto it = node_->find(key);
    if (it == node_->end()) throw InputError("field '" + field(key) + "': required");
    return *it;
}

double Section::number(const char* key) {
    const json& v = lookup(key);
    if (!v.is_number()) throw InputError("field '" + field(key) + "': expected a number");
    seen_.insert(key);
    const double x = v.get<double>();
    (*resolved_)[key] = x;
    return x;
}

double Section::number(const char* key, double fallback) {
    if (has(key)) return number(key);
    (*resolved_)[key] = fallback;
    return fallback;
}

std::uint64_t Section::integer(const char* key) {
    const json& v = lookup(key);
    if (!v.is_number_unsigned()) throw InputError("field '" + field(key) + "': expected a nonnegative integer");
    seen_.insert(key);
    const auto x = v.get<std::uint64_t>();
    (*resolved_)[key] = x;
    return x;
}

std::uint64_t Section::integer(const char* key, std::uint64_t fallback) {
    if (has(key)) return integer(key);
    (*resolved_)[key] = fallback;
    return fallback;
}

std::vector<double> Section::numbers(const char* key) {
    const json& v = lookup(key);
    if (!v.is_array()) throw InputError("field '" + field(key) + "': expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number())
            throw InputError("field '" + field(key) + "[" + std::to_string(k) + "]': expected a number");
        out.push_back(v[k].get<double>());
    }
    seen_.insert(key);
    (*resolved_)[key] = out;
    return out;
}

std::vector<double> Section::numbers(const char* key, std::vector<double> fallback) {
    if (has(key)) return numbers(key);
    (*resolved_)[key] = fallback;
    return fallback;
}

Amplitudes Section::amplitudes(const char* key) {
    const json& v = lookup(key);
    if (!v.is_array()) throw InputError("field '" + field(key) + "': expected an array");
    Amplitudes a(static_cast<Eigen::Index>(v.size()));
    json echo = json::array();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const json& e = v[k];
        const std::string name = field(key) + "[" + std::to_string(k) + "]";
        if (e.is_number()) {
            a[static_cast<Eigen::Index>(k)] = Complex(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            a[static_cast<Eigen::Index>(k)] = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
            throw InputError("field '" + name + "': expected a number or a [re, im] pair");
        }
        echo.push_back(json::array({a[static_cast<Eigen::Index>(k)].real(), a[static_cast<Eigen::Index>(k)].imag()}));
    }
    seen_.insert(key);
    (*resolved_)[key] = echo;
    return a;
}

Section Section::section(const char* key) {
    const json& v = lookup(key);
    seen_.insert(key);
    return Section(v, (*resolved_)[key], field(key));
}

std::vector<Section> Section::sections(const char* key) {
    const json& v = lookup(key);
    if (!v.is_array()) throw InputError("field '" + field(key) + "': expected an array of objects");
    seen_.insert(key);
    json& target = (*resolved_)[key];
    target = json::array();
    for (std::size_t k = 0; k < v.size(); ++k) target.push_back(json::object());
    std::vector<Section> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        out.emplace_back(v[k], target[k], field(key) + "[" + std::to_string(k) + "]");
    return out;
}

void Section::finish() const {
    for (auto it = node_->begin(); it != node_->end(); ++it)
        if (!seen_.contains(it.key())) throw InputError("field '" + field(it.key().c_str()) + "': unknown key");
}

}  // namespace detail
}  // namespace collapse::scenario
