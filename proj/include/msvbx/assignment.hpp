// Copyright (c) 2026 The msvbx Authors
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

#include <vector>

#include <Eigen/Dense>

namespace msvbx {

/// Maximum-weight one-to-one matching on a rectangular weight matrix
/// (Hungarian algorithm). Returns, per row, the matched column or -1.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

/// Sum of the weights selected by an assignment.
double assignment_weight(const Eigen::MatrixXd& weights, const std::vector<int>& rows_to_cols);

}  // namespace msvbx
