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

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace msvbx {

/// Training set for the embedding backend; one row per sample.
struct LabeledEmbeddings {
  Eigen::MatrixXd vectors;
  std::vector<int> speaker_labels;
};

/// Throws Error(kDegenerateInput) for a zero vector.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v);

struct LdaModel {
  Eigen::MatrixXd projection;   // input_dim x out_dim
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::VectorXd global_mean;  // mean of the training data in the projected space
};

/// Fisher LDA via the generalized eigenproblem of (between, within) scatter.
/// out_dim is clamped to min(input_dim, num_speakers - 1) with a warning.
LdaModel train_lda(const LabeledEmbeddings& data, std::size_t out_dim);

/// Transform that simultaneously diagonalizes a within/between covariance pair:
/// Tᵀ·within·T = I and Tᵀ·between·T = diag(phi), phi descending and >= 0.
struct Diagonalization {
  Eigen::MatrixXd transform;
  Eigen::VectorXd phi;
};

Diagonalization simultaneous_diagonalization(const Eigen::MatrixXd& within,
                                             const Eigen::MatrixXd& between);

/// Two-covariance PLDA estimate on already projected data.
struct ScatterPair {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
};
ScatterPair class_scatter(const LabeledEmbeddings& data);
Diagonalization train_plda(const LabeledEmbeddings& data);

/// Full embedding pipeline: L2 normalize, LDA project, center, whiten.
struct PldaBackend {
  std::size_t input_dim = 0;
  std::size_t lda_dim = 0;
  Eigen::VectorXd global_mean;       // lda_dim
  Eigen::MatrixXd lda_matrix;        // input_dim x lda_dim
  Eigen::MatrixXd whiten_transform;  // lda_dim x lda_dim
  Eigen::VectorXd phi;               // lda_dim, descending
  bool l2_normalize_input = true;

  /// Backend for data already living in the diagonalized model space.
  static PldaBackend identity(const Eigen::VectorXd& phi);

  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project(std::span<const float> v) const;
};

PldaBackend train_backend(const LabeledEmbeddings& data, std::size_t lda_dim);

void to_json(nlohmann::json& j, const PldaBackend& backend);
void from_json(const nlohmann::json& j, PldaBackend& backend);
void save_backend(const PldaBackend& backend, const std::filesystem::path& path);
PldaBackend load_backend(const std::filesystem::path& path);

/// Labeled-embedding interchange: {"vectors": [[...], ...], "labels": [...]}.
LabeledEmbeddings load_labeled_embeddings(const std::filesystem::path& path);
void save_labeled_embeddings(const LabeledEmbeddings& data, const std::filesystem::path& path);

}  // namespace msvbx
