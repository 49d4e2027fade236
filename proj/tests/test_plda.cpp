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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>

#include "msvbx/error.hpp"
#include "msvbx/plda.hpp"
#include "msvbx/synth.hpp"

using namespace msvbx;

namespace {

LabeledEmbeddings random_labeled(std::uint64_t seed, int speakers, int per, int dim, double spread = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  LabeledEmbeddings data;
  data.vectors.resize(speakers * per, dim);
  for (int g = 0; g < speakers; ++g) {
    Eigen::VectorXd mean(dim);
    for (auto& v : mean) v = spread * n(rng);
    for (int i = 0; i < per; ++i) {
      for (int d = 0; d < dim; ++d) data.vectors(g * per + i, d) = mean(d) + n(rng) * (1.0 + 0.3 * d);
      data.speaker_labels.push_back(g);
    }
  }
  return data;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (auto& v : a.reshaped()) v = n(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
}

}  // namespace

TEST(L2Normalize, ThreeFourFive) {
  const Eigen::Vector2d v(3.0, 4.0);
  const Eigen::VectorXd u = l2_normalize(v);
  EXPECT_DOUBLE_EQ(u(0), 0.6);
  EXPECT_DOUBLE_EQ(u(1), 0.8);
}

TEST(L2Normalize, UnitVectorIsFixedAndNormIsOne) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd v(7);
    for (auto& x : v) x = n(rng);
    const Eigen::VectorXd u = l2_normalize(v);
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    EXPECT_LT((l2_normalize(u) - u).norm(), 1e-15);
  }
}

TEST(L2Normalize, ZeroVectorIsError) {
  EXPECT_THROW(l2_normalize(Eigen::VectorXd::Zero(2)), Error);
}

TEST(Lda, TwoClassDirectionMatchesFisherClosedForm) {
  // Fisher's two-class discriminant: w proportional to Sw^-1 (m1 - m0).
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  LabeledEmbeddings data;
  data.vectors.resize(400, 2);
  for (int i = 0; i < 400; ++i) {
    const int g = i % 2;
    data.vectors(i, 0) = (g == 0 ? -2.0 : 2.0) + n(rng);
    data.vectors(i, 1) = n(rng);
    data.speaker_labels.push_back(g);
  }
  const auto lda = train_lda(data, 1);
  ASSERT_EQ(lda.projection.cols(), 1);

  Eigen::Vector2d m0 = Eigen::Vector2d::Zero(), m1 = Eigen::Vector2d::Zero();
  for (int i = 0; i < 400; ++i) (i % 2 == 0 ? m0 : m1) += data.vectors.row(i).transpose();
  m0 /= 200.0;
  m1 /= 200.0;
  Eigen::Matrix2d sw = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 400; ++i) {
    const Eigen::Vector2d d = data.vectors.row(i).transpose() - (i % 2 == 0 ? m0 : m1);
    sw += d * d.transpose();
  }
  const Eigen::Vector2d fisher = sw.ldlt().solve(m1 - m0).normalized();
  const Eigen::Vector2d got = lda.projection.col(0).normalized();
  EXPECT_NEAR(std::abs(got.dot(fisher)), 1.0, 1e-10);
  EXPECT_GT(std::abs(got(0)), 0.99);  // essentially axis 1
}

TEST(Lda, ProjectionDiagonalizesScatter) {
  const auto data = random_labeled(3, 12, 15, 6);
  const auto lda = train_lda(data, 6);
  ASSERT_EQ(lda.projection.cols(), 6);
  const auto sc = class_scatter(data);
  const Eigen::MatrixXd w = lda.projection.transpose() * sc.within * lda.projection;
  const Eigen::MatrixXd b = lda.projection.transpose() * sc.between * lda.projection;
  EXPECT_LT((w - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-8);
  Eigen::MatrixXd off = b;
  off.diagonal().setZero();
  EXPECT_LT(off.norm(), 1e-8);
  for (Eigen::Index i = 1; i < lda.eigenvalues.size(); ++i) {
    EXPECT_GE(lda.eigenvalues(i - 1), lda.eigenvalues(i));
  }
}

TEST(Lda, OutputDimensionIsClampedToClassCount) {
  const auto data = random_labeled(4, 3, 10, 6);
  const auto lda = train_lda(data, 32);
  EXPECT_EQ(lda.projection.cols(), 2);
}

TEST(Lda, SingleSpeakerIsDegenerate) {
  auto data = random_labeled(5, 1, 10, 3);
  try {
    train_lda(data, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateInput);
  }
}

TEST(SimultaneousDiagonalization, AlreadyDiagonalCase) {
  Eigen::Matrix2d sb = Eigen::Matrix2d::Zero();
  sb(0, 0) = 4.0;
  sb(1, 1) = 1.0;
  const auto diag = simultaneous_diagonalization(Eigen::Matrix2d::Identity(), sb);
  EXPECT_NEAR(diag.phi(0), 4.0, 1e-12);
  EXPECT_NEAR(diag.phi(1), 1.0, 1e-12);
  EXPECT_LT((diag.transform.cwiseAbs() - Eigen::Matrix2d::Identity()).norm(), 1e-12);
}

TEST(SimultaneousDiagonalization, RandomSpdPairs) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd sw = random_spd(rng, 3);
    const Eigen::MatrixXd sb = random_spd(rng, 3);
    const auto diag = simultaneous_diagonalization(sw, sb);
    const Eigen::MatrixXd w = diag.transform.transpose() * sw * diag.transform;
    Eigen::MatrixXd b = diag.transform.transpose() * sb * diag.transform;
    EXPECT_LT((w - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((b.diagonal() - diag.phi).cwiseAbs().maxCoeff(), 1e-10);
    b.diagonal().setZero();
    EXPECT_LT(b.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(diag.phi(0), diag.phi(1));
    EXPECT_GE(diag.phi(1), diag.phi(2));
  }
}

TEST(SimultaneousDiagonalization, NegativeBetweenEigenvaluesAreClamped) {
  Eigen::Matrix2d sb = Eigen::Matrix2d::Zero();
  sb(0, 0) = 2.0;
  sb(1, 1) = -1e-9;
  const auto diag = simultaneous_diagonalization(Eigen::Matrix2d::Identity(), sb);
  EXPECT_EQ(diag.phi(1), 0.0);
}

TEST(Plda, PhiNonIncreasingAndOrderInvariant) {
  const auto data = random_labeled(11, 20, 8, 5);
  const auto a = train_plda(data);
  for (Eigen::Index i = 1; i < a.phi.size(); ++i) EXPECT_GE(a.phi(i - 1), a.phi(i));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.vectors.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(2));
  LabeledEmbeddings shuffled;
  shuffled.vectors.resize(data.vectors.rows(), data.vectors.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.vectors.row(static_cast<Eigen::Index>(i)) = data.vectors.row(order[i]);
    shuffled.speaker_labels.push_back(data.speaker_labels[static_cast<std::size_t>(order[i])]);
  }
  const auto b = train_plda(shuffled);
  EXPECT_LT((a.phi - b.phi).cwiseAbs().maxCoeff(), 1e-9 * a.phi.maxCoeff());
  EXPECT_LT((a.transform.cwiseAbs() - b.transform.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Plda, SingletonSpeakersAreRejected) {
  auto data = random_labeled(12, 5, 1, 3);
  EXPECT_THROW(train_plda(data), Error);
}

TEST(Plda, RecoversPhiOnLargeSyntheticSet) {
  // With K samples per speaker and both scatters divided by n, the within
  // scatter tends to (K-1)/K and the between scatter to phi + 1/K, so the
  // estimate converges to (phi + 1/K) * K / (K-1) as speakers grow.
  Eigen::VectorXd truth(3);
  truth << 6.0, 2.0, 0.5;
  const double K = 20.0;
  const auto data = generate_labeled(truth, 3000, 20, 77);
  const auto plda = train_plda(data);
  for (Eigen::Index d = 0; d < 3; ++d) {
    const double limit = (truth(d) + 1.0 / K) * K / (K - 1.0);
    EXPECT_NEAR(plda.phi(d) / limit, 1.0, 0.05) << d;
  }
}

TEST(Backend, IdentityBackendWithZeroMeanMapsToZero) {
  const auto backend = PldaBackend::identity(Eigen::Vector3d(3.0, 2.0, 1.0));
  EXPECT_LT(backend.project(Eigen::VectorXd(Eigen::Vector3d::Zero())).norm(), 1e-15);
  const Eigen::Vector3d v(1.0, -2.0, 0.5);
  EXPECT_LT((backend.project(Eigen::VectorXd(v)) - v).norm(), 1e-15);
}

TEST(Backend, GlobalMeanPreimageProjectsToZero) {
  const auto data = random_labeled(13, 10, 10, 4);
  auto backend = train_backend(data, 3);
  backend.l2_normalize_input = false;
  backend.lda_matrix = Eigen::MatrixXd::Identity(4, 4);
  backend.whiten_transform = Eigen::MatrixXd::Identity(4, 4);
  backend.lda_dim = 4;
  backend.phi = Eigen::VectorXd::Ones(4);
  backend.global_mean = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0);
  EXPECT_LT(backend.project(Eigen::VectorXd(backend.global_mean)).norm(), 1e-15);
}

TEST(Backend, DimensionMismatchIsRejected) {
  const auto backend = PldaBackend::identity(Eigen::Vector2d(1.0, 1.0));
  try {
    backend.project(Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Backend, SerializationRoundTripGivesIdenticalProjection) {
  const auto data = random_labeled(14, 15, 10, 8);
  const auto backend = train_backend(data, 5);
  const auto path = std::filesystem::temp_directory_path() / "msvbx_backend_rt.json";
  save_backend(backend, path);
  const auto loaded = load_backend(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.lda_dim, backend.lda_dim);
  EXPECT_EQ(loaded.l2_normalize_input, backend.l2_normalize_input);
  for (Eigen::Index i = 0; i < data.vectors.rows(); ++i) {
    const Eigen::VectorXd v = data.vectors.row(i).transpose();
    EXPECT_EQ(loaded.project(v), backend.project(v));
  }
}

TEST(Backend, FloatSpanProjectionMatchesDouble) {
  const auto data = random_labeled(15, 10, 10, 4);
  const auto backend = train_backend(data, 3);
  const std::vector<float> f{0.5F, -1.25F, 2.0F, 0.125F};
  const Eigen::Vector4d d(0.5, -1.25, 2.0, 0.125);
  EXPECT_LT((backend.project(std::span<const float>(f)) - backend.project(Eigen::VectorXd(d))).norm(), 1e-14);
}

TEST(Backend, LabeledEmbeddingsRoundTrip) {
  const auto data = random_labeled(16, 4, 3, 2);
  const auto path = std::filesystem::temp_directory_path() / "msvbx_labeled_rt.json";
  save_labeled_embeddings(data, path);
  const auto back = load_labeled_embeddings(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.speaker_labels, data.speaker_labels);
  EXPECT_EQ(back.vectors, data.vectors);
}
