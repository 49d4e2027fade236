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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "msvbx/error.hpp"
#include "msvbx/log.hpp"
#include "msvbx/plda.hpp"

namespace msvbx {

namespace {

struct ClassStats {
  std::vector<int> labels;           // distinct labels, ascending
  std::vector<std::size_t> counts;
  Eigen::MatrixXd means;             // one row per class
  Eigen::VectorXd global_mean;
};

ClassStats class_stats(const LabeledEmbeddings& data) {
  const auto n = static_cast<std::size_t>(data.vectors.rows());
  if (n == 0 || data.speaker_labels.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "labels do not match the sample count");
  }
  std::map<int, std::size_t> index;
  for (int label : data.speaker_labels) index.emplace(label, 0);
  ClassStats stats;
  for (auto& [label, idx] : index) {
    idx = stats.labels.size();
    stats.labels.push_back(label);
  }
  const auto dim = data.vectors.cols();
  stats.counts.assign(stats.labels.size(), 0);
  stats.means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(stats.labels.size()), dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = index[data.speaker_labels[i]];
    stats.means.row(static_cast<Eigen::Index>(k)) += data.vectors.row(static_cast<Eigen::Index>(i));
    ++stats.counts[k];
  }
  for (std::size_t k = 0; k < stats.labels.size(); ++k) {
    stats.means.row(static_cast<Eigen::Index>(k)) /= static_cast<double>(stats.counts[k]);
  }
  stats.global_mean = data.vectors.colwise().mean().transpose();
  return stats;
}

// Adds a ridge only when the matrix is not safely positive definite.
Eigen::MatrixXd regularized(const Eigen::MatrixXd& m) {
  const auto dim = static_cast<double>(m.rows());
  const double avg = m.trace() / dim;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (avg > 0.0 && min_eig > 1e-10 * avg) return m;
  const double ridge = avg > 0.0 ? 1e-6 * avg : 1e-6;
  log().debug("within-class scatter is near singular; adding ridge {}", ridge);
  return m + ridge * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Flips each column so its largest-magnitude entry is positive.
void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

}  // namespace

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kDegenerateInput, "cannot normalize a zero or non-finite vector");
  }
  return v / norm;
}

ScatterPair class_scatter(const LabeledEmbeddings& data) {
  const ClassStats stats = class_stats(data);
  const auto n = static_cast<double>(data.vectors.rows());
  const auto dim = data.vectors.cols();
  std::map<int, std::size_t> index;
  for (std::size_t k = 0; k < stats.labels.size(); ++k) index[stats.labels[k]] = k;

  ScatterPair out{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (Eigen::Index i = 0; i < data.vectors.rows(); ++i) {
    const auto k = static_cast<Eigen::Index>(index[data.speaker_labels[static_cast<std::size_t>(i)]]);
    const Eigen::VectorXd d = (data.vectors.row(i) - stats.means.row(k)).transpose();
    out.within.noalias() += d * d.transpose();
  }
  for (std::size_t k = 0; k < stats.labels.size(); ++k) {
    const Eigen::VectorXd d =
        stats.means.row(static_cast<Eigen::Index>(k)).transpose() - stats.global_mean;
    out.between.noalias() += static_cast<double>(stats.counts[k]) * d * d.transpose();
  }
  out.within /= n;
  out.between /= n;
  return out;
}

LdaModel train_lda(const LabeledEmbeddings& data, std::size_t out_dim) {
  const ClassStats stats = class_stats(data);
  const std::size_t num_classes = stats.labels.size();
  if (num_classes < 2) {
    throw Error(ErrorCode::kDegenerateInput, "LDA needs at least two speakers");
  }
  const auto input_dim = static_cast<std::size_t>(data.vectors.cols());
  const std::size_t feasible = std::min(input_dim, num_classes - 1);
  if (out_dim == 0 || out_dim > feasible) {
    log().warn("LDA dimension {} clamped to {} (input dim {}, {} speakers)", out_dim, feasible,
               input_dim, num_classes);
    out_dim = feasible;
  }
  const ScatterPair scatter = class_scatter(data);
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      scatter.between, regularized(scatter.within));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateInput, "LDA eigen decomposition failed");
  }
  const auto k = static_cast<Eigen::Index>(out_dim);
  LdaModel model;
  // Eigen returns ascending eigenvalues; take the top k in descending order.
  model.projection = solver.eigenvectors().rightCols(k).rowwise().reverse();
  model.eigenvalues = solver.eigenvalues().tail(k).reverse();
  fix_signs(model.projection);
  model.global_mean = model.projection.transpose() * stats.global_mean;
  return model;
}

Diagonalization simultaneous_diagonalization(const Eigen::MatrixXd& within,
                                             const Eigen::MatrixXd& between) {
  if (within.rows() != within.cols() || between.rows() != between.cols() ||
      within.rows() != between.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance matrices must be square and equal size");
  }
  const Eigen::MatrixXd w = regularized(within);
  const Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateModel, "within-speaker covariance is not positive definite");
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(between, w);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateModel, "PLDA eigen decomposition failed");
  }
  Diagonalization out;
  out.transform = solver.eigenvectors().rowwise().reverse();
  out.phi = solver.eigenvalues().reverse().cwiseMax(0.0);
  fix_signs(out.transform);
  return out;
}

Diagonalization train_plda(const LabeledEmbeddings& data) {
  const ClassStats stats = class_stats(data);
  if (stats.labels.size() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "PLDA needs at least two speakers");
  }
  for (std::size_t k = 0; k < stats.counts.size(); ++k) {
    if (stats.counts[k] < 2) {
      throw Error(ErrorCode::kDegenerateInput,
                  "speaker " + std::to_string(stats.labels[k]) + " has fewer than two samples");
    }
  }
  const ScatterPair scatter = class_scatter(data);
  return simultaneous_diagonalization(scatter.within, scatter.between);
}

PldaBackend PldaBackend::identity(const Eigen::VectorXd& phi) {
  PldaBackend b;
  b.input_dim = static_cast<std::size_t>(phi.size());
  b.lda_dim = b.input_dim;
  b.global_mean = Eigen::VectorXd::Zero(phi.size());
  b.lda_matrix = Eigen::MatrixXd::Identity(phi.size(), phi.size());
  b.whiten_transform = Eigen::MatrixXd::Identity(phi.size(), phi.size());
  b.phi = phi;
  b.l2_normalize_input = false;
  return b;
}

Eigen::VectorXd PldaBackend::project(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding has dimension " +
                                                   std::to_string(v.size()) + ", backend expects " +
                                                   std::to_string(input_dim));
  }
  const Eigen::VectorXd lda =
      lda_matrix.transpose() * (l2_normalize_input ? l2_normalize(v) : v) - global_mean;
  return whiten_transform.transpose() * lda;
}

Eigen::VectorXd PldaBackend::project(std::span<const float> v) const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) d[static_cast<Eigen::Index>(i)] = v[i];
  return project(d);
}

PldaBackend train_backend(const LabeledEmbeddings& data, std::size_t lda_dim) {
  LabeledEmbeddings normalized{data.vectors, data.speaker_labels};
  for (Eigen::Index i = 0; i < normalized.vectors.rows(); ++i) {
    normalized.vectors.row(i) = l2_normalize(data.vectors.row(i).transpose()).transpose();
  }
  const LdaModel lda = train_lda(normalized, lda_dim);

  LabeledEmbeddings projected{
      (normalized.vectors * lda.projection).rowwise() - lda.global_mean.transpose(),
      data.speaker_labels};
  const Diagonalization plda = train_plda(projected);

  PldaBackend b;
  b.input_dim = static_cast<std::size_t>(data.vectors.cols());
  b.lda_dim = static_cast<std::size_t>(lda.projection.cols());
  b.global_mean = lda.global_mean;
  b.lda_matrix = lda.projection;
  b.whiten_transform = plda.transform;
  b.phi = plda.phi;
  return b;
}

}  // namespace msvbx
