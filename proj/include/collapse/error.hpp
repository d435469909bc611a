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

#include <stdexcept>
#include <string>

namespace collapse {

/// A caller violated an operation's precondition. `where()` names the owning
/// check, e.g. "JumpModel.rate".
class PreconditionError : public std::invalid_argument {
  public:
    PreconditionError(std::string where, const std::string& what)
        : std::invalid_argument(where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

  private:
    std::string where_;
};

/// The generator is not diagonalizable within tolerance (merged eigenvalues).
class DefectiveSpectrumError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A post-condition that should hold by construction failed numerically.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* where, const std::string& what) {
    if (!condition) throw PreconditionError(where, what);
}

}  // namespace collapse
