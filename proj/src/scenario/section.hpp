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

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapse/hilbert.hpp"

namespace collapse::scenario::detail {

/// Typed reader over one JSON object. Every value read (or defaulted) is
/// echoed into `resolved`; keys never read are reported by finish().
class Section {
  public:
    Section(const nlohmann::json& node, nlohmann::json& resolved, std::string path);

    bool has(const char* key) const;
    double number(const char* key);
    double number(const char* key, double fallback);
    std::uint64_t integer(const char* key);
    std::uint64_t integer(const char* key, std::uint64_t fallback);
    std::vector<double> numbers(const char* key);
    std::vector<double> numbers(const char* key, std::vector<double> fallback);
    /// Entries are real numbers or [re, im] pairs.
    Amplitudes amplitudes(const char* key);
    Section section(const char* key);
    /// Array of objects; one Section per element.
    std::vector<Section> sections(const char* key);
    void finish() const;

    const std::string& path() const noexcept { return path_; }

  private:
    const nlohmann::json& lookup(const char* key) const;
    std::string field(const char* key) const;

    const nlohmann::json* node_;
    nlohmann::json* resolved_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace collapse::scenario::detail
