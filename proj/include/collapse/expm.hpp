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

#include <Eigen/Dense>

namespace collapse {

/// exp(A) by scaling and squaring with a diagonal Pade approximant of degree
/// 3, 5, 7, 9 or 13 chosen from ||A||_1 (Higham, SIAM J. Matrix Anal. Appl.
/// 26 (2005) 1179).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

}  // namespace collapse
