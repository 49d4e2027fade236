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

#include <fstream>

#include "msvbx/error.hpp"
#include "msvbx/plda.hpp"

namespace msvbx {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                                 const char* name) {
  if (!j.is_array() || j.size() != rows) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " has the wrong row count");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " has the wrong column count");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, std::size_t size, const char* name) {
  if (!j.is_array() || j.size() != size) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " has the wrong length");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

void to_json(nlohmann::json& j, const PldaBackend& b) {
  j = nlohmann::json{
      {"input_dim", b.input_dim},
      {"lda_dim", b.lda_dim},
      {"global_mean", std::vector<double>(b.global_mean.data(), b.global_mean.data() + b.global_mean.size())},
      {"lda_matrix", matrix_to_json(b.lda_matrix)},
      {"whiten_transform", matrix_to_json(b.whiten_transform)},
      {"phi", std::vector<double>(b.phi.data(), b.phi.data() + b.phi.size())},
      {"l2_normalize", b.l2_normalize_input},
  };
}

void from_json(const nlohmann::json& j, PldaBackend& b) {
  try {
    b.input_dim = j.at("input_dim").get<std::size_t>();
    b.lda_dim = j.at("lda_dim").get<std::size_t>();
    b.global_mean = vector_from_json(j.at("global_mean"), b.lda_dim, "global_mean");
    b.lda_matrix = matrix_from_json(j.at("lda_matrix"), b.input_dim, b.lda_dim, "lda_matrix");
    b.whiten_transform =
        matrix_from_json(j.at("whiten_transform"), b.lda_dim, b.lda_dim, "whiten_transform");
    b.phi = vector_from_json(j.at("phi"), b.lda_dim, "phi");
    b.l2_normalize_input = j.value("l2_normalize", true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed backend model: ") + e.what());
  }
}

void save_backend(const PldaBackend& backend, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << nlohmann::json(backend).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PldaBackend load_backend(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return j.get<PldaBackend>();
}

LabeledEmbeddings load_labeled_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  LabeledEmbeddings data;
  try {
    nlohmann::json j;
    in >> j;
    const auto& vectors = j.at("vectors");
    data.speaker_labels = j.at("labels").get<std::vector<int>>();
    if (vectors.empty() || vectors.size() != data.speaker_labels.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "vectors and labels differ in length");
    }
    data.vectors = matrix_from_json(vectors, vectors.size(), vectors[0].size(), "vectors");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return data;
}

void save_labeled_embeddings(const LabeledEmbeddings& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << nlohmann::json{{"vectors", matrix_to_json(data.vectors)}, {"labels", data.speaker_labels}}
      << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace msvbx
