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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "msvbx/error.hpp"
#include "msvbx/state_space.hpp"
#include "msvbx/vb.hpp"
#include "oracles.hpp"

using namespace msvbx;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

StreamData single_value_data(double x, double phi) {
  RowMatrix m(1, 1);
  m(0, 0) = x;
  return make_stream_data({1}, 1, m, Eigen::VectorXd::Constant(1, phi));
}

}  // namespace

// ---------------------------------------------------------------- state space

TEST(StateSpace, Counts) {
  EXPECT_EQ(StateSpace(3, 2).num_states(), 9u);
  EXPECT_EQ(StateSpace(1, 2).num_states(), 1u);
  EXPECT_EQ(StateSpace(4, 3).num_states(), 40u);
  EXPECT_EQ(StateSpace(5, 1).num_states(), 5u);
}

TEST(StateSpace, CountsMatchFallingFactorialFormula) {
  for (std::size_t g = 1; g <= 6; ++g) {
    for (std::size_t c = 1; c <= 4; ++c) {
      std::size_t expected = 0, term = 1;
      for (std::size_t k = 1; k <= std::min(g, c); ++k) {
        term *= g - k + 1;
        expected += term;
      }
      EXPECT_EQ(StateSpace(g, c).num_states(), expected) << g << "," << c;
    }
  }
}

TEST(StateSpace, OrderByLengthThenLexicographic) {
  const StateSpace sp(3, 2);
  const std::vector<std::vector<int>> expected = {{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  ASSERT_EQ(sp.num_states(), expected.size());
  for (std::size_t s = 0; s < expected.size(); ++s) {
    const auto st = sp.state(s);
    EXPECT_EQ(std::vector<int>(st.begin(), st.end()), expected[s]);
    EXPECT_EQ(sp.find(expected[s]), s);
  }
  const std::vector<int> repeated{1, 1};
  EXPECT_FALSE(sp.find(repeated).has_value());
}

TEST(StateSpace, SingleSpeakerHasOnlySingletonTuple) {
  const StateSpace sp(1, 2);
  EXPECT_EQ(sp.max_state_size(), 1u);
  EXPECT_EQ(sp.state(0)[0], 0);
  EXPECT_TRUE(sp.states_of_size(2).empty());
}

TEST(StateSpace, TiedSetsCoverEveryAppearance) {
  const StateSpace sp(4, 3);
  std::size_t total = 0;
  for (std::size_t g = 0; g < 4; ++g) {
    for (const auto& sub : sp.tied_set(g)) EXPECT_EQ(sp.speaker(sub.state, sub.stream), static_cast<int>(g));
    total += sp.tied_set(g).size();
  }
  std::size_t slots = 0;
  for (std::size_t s = 0; s < sp.num_states(); ++s) slots += sp.state_size(s);
  EXPECT_EQ(total, slots);
  EXPECT_EQ(sp.tied_set(0).size(), 1u + 6u + 18u);
}

TEST(StateSpace, RejectsZeroSizes) {
  EXPECT_THROW(StateSpace(0, 2), Error);
  EXPECT_THROW(StateSpace(2, 0), Error);
}

// ---------------------------------------------------------------- q(Y)

TEST(SpeakerPosterior, ZeroOccupancyGivesPrior) {
  const StateSpace sp(2, 1);
  const auto data = single_value_data(2.0, 1.0);
  Eigen::MatrixXd gamma(1, 2);
  gamma << 1.0, 0.0;
  const auto q = update_speaker_posteriors(sp, gamma, data, InferenceConfig{});
  EXPECT_EQ(q[1].precision(0), 1.0);
  EXPECT_EQ(q[1].alpha(0), 0.0);
}

TEST(SpeakerPosterior, DirectSubstitution) {
  const StateSpace sp(1, 1);
  const auto data = single_value_data(2.0, 1.0);
  InferenceConfig cfg;
  cfg.fa = 1.0;
  cfg.fb = 1.0;
  const auto q = update_speaker_posteriors(sp, Eigen::MatrixXd::Ones(1, 1), data, cfg);
  EXPECT_DOUBLE_EQ(q[0].precision(0), 2.0);
  EXPECT_DOUBLE_EQ(q[0].alpha(0), 1.0);
}

TEST(SpeakerPosterior, PrecisionAtLeastOne) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto p = oracle::random_hmm_problem(rng, 20, 4, 3, 6);
    const StateSpace sp(p.num_speakers, p.data.max_streams);
    for (const auto& q : update_speaker_posteriors(sp, p.init_gamma, p.data, InferenceConfig{})) {
      EXPECT_GE(q.precision.minCoeff(), 1.0);
    }
  }
}

// ---------------------------------------------------------------- emissions

TEST(Emission, HandComputedOneDimensional) {
  const StateSpace sp(1, 1);
  const auto data = single_value_data(1.0, 1.0);
  InferenceConfig cfg;
  cfg.fa = 1.0;
  const std::vector<SpeakerPosterior> q{{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 2.0)}};
  const auto e = state_log_emission(sp, q, data, 0, cfg);
  const double expected = 0.5 - 0.5 * (0.5 + 0.25) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5;
  EXPECT_NEAR(e(0), expected, 1e-15);
  EXPECT_NEAR(e(0), -1.294, 5e-4);
}

TEST(Emission, ZeroBetweenVarianceReducesToStandardNormal) {
  RowMatrix x(2, 3);
  x << 1.0, -2.0, 0.5, 0.3, 0.0, 2.0;
  const auto data = make_stream_data({2}, 2, x, Eigen::VectorXd::Zero(3));
  const StateSpace sp(2, 2);
  const std::vector<SpeakerPosterior> q(2, {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)});
  const InferenceConfig cfg;
  const auto e = state_log_emission(sp, q, data, 0, cfg);
  const double expected =
      cfg.fa * (-3.0 * std::log(2.0 * std::numbers::pi) - 0.5 * x.row(0).squaredNorm() - 0.5 * x.row(1).squaredNorm());
  for (std::size_t s : sp.states_of_size(2)) EXPECT_NEAR(e(static_cast<Eigen::Index>(s)), expected, 1e-12);
  for (std::size_t s : sp.states_of_size(1)) EXPECT_EQ(e(static_cast<Eigen::Index>(s)), kNegInf);
}

TEST(Emission, PermutedStatesEqualWhenStreamsCoincide) {
  RowMatrix x(2, 2);
  x << 0.7, -0.2, 0.7, -0.2;
  const auto data = make_stream_data({2}, 2, x, Eigen::Vector2d(2.0, 1.0));
  const StateSpace sp(3, 2);
  std::vector<SpeakerPosterior> q;
  for (int g = 0; g < 3; ++g) q.push_back({Eigen::Vector2d(0.3 * g, -0.1 * g), Eigen::Vector2d(1.5 + g, 2.0)});
  const auto e = state_log_emission(sp, q, data, 0, InferenceConfig{});
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const std::vector<int> ab{a, b}, ba{b, a};
      EXPECT_NEAR(e(static_cast<Eigen::Index>(*sp.find(ab))), e(static_cast<Eigen::Index>(*sp.find(ba))), 1e-12);
    }
  }
}

TEST(Emission, MatchesDirectExpectation) {
  std::mt19937_64 rng(32);
  const auto p = oracle::random_hmm_problem(rng, 10, 4, 3, 5, false);
  const StateSpace sp(p.num_speakers, p.data.max_streams);
  const InferenceConfig cfg;
  const auto q = update_speaker_posteriors(sp, p.init_gamma, p.data, cfg);
  for (std::size_t t = 0; t < p.data.num_chunks; ++t) {
    const auto e = state_log_emission(sp, q, p.data, t, cfg);
    for (std::size_t s : sp.states_of_size(p.data.active_counts[t])) {
      Eigen::MatrixXd one = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.data.num_chunks),
                                                  static_cast<Eigen::Index>(sp.num_states()));
      one(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = 1.0;
      // KL is added back so only the expected log-likelihood remains.
      double kl = 0.0;
      for (const auto& post : q) kl += kl_divergence(post);
      const double direct = oracle::direct_occupancy_bound(sp, one, p.data, q, cfg) + cfg.fb * kl;
      EXPECT_NEAR(e(static_cast<Eigen::Index>(s)), direct, 1e-9 * (1.0 + std::abs(direct)));
    }
  }
}

// ---------------------------------------------------------------- forward-backward

TEST(ForwardBackward, SingleChunkIsPiTimesEmission) {
  HmmParams params;
  params.pi = Eigen::Vector3d(0.2, 0.5, 0.3);
  params.p_loop = 0.8;
  Eigen::MatrixXd e(1, 3);
  e << 0.0, -1.0, 2.0;
  const auto fb = forward_backward(e, params);
  Eigen::Vector3d w = params.pi.array() * e.row(0).transpose().array().exp();
  EXPECT_NEAR(fb.log_evidence, std::log(w.sum()), 1e-14);
  w /= w.sum();
  EXPECT_LT((fb.gamma.row(0).transpose() - w).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardBackward, UniformEmissionsGivePi) {
  HmmParams params;
  params.pi = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  params.p_loop = 0.6;
  const auto fb = forward_backward(Eigen::MatrixXd::Zero(7, 4), params);
  for (Eigen::Index t = 0; t < 7; ++t) EXPECT_LT((fb.gamma.row(t).transpose() - params.pi).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(fb.log_evidence, 0.0, 1e-14);
}

TEST(ForwardBackward, MatchesPathEnumeration) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const int T = 6, S = 9;
    HmmParams params;
    params.p_loop = 0.1 + 0.8 * u(rng);
    params.pi = Eigen::VectorXd(S);
    for (auto& v : params.pi) v = 0.05 + u(rng);
    params.pi /= params.pi.sum();
    Eigen::MatrixXd e(T, S);
    for (auto& v : e.reshaped()) v = n(rng);
    const auto fb = forward_backward(e, params);
    const auto ref = oracle::enumerate_paths(e, params.pi, params.p_loop);
    EXPECT_LT((fb.gamma - ref.gamma).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(fb.log_evidence, ref.log_evidence, 1e-10);
    EXPECT_LT((fb.entry_counts - ref.entry_counts).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ForwardBackward, FactorizedEqualsDense) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> n(0.0, 5.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const int T = 40, S = 15;
    HmmParams params;
    params.p_loop = 0.05 + 0.9 * u(rng);
    params.pi = Eigen::VectorXd(S);
    for (auto& v : params.pi) v = u(rng) < 0.2 ? 0.0 : u(rng);
    params.pi(0) = 0.5;
    params.pi /= params.pi.sum();
    Eigen::MatrixXd e(T, S);
    for (auto& v : e.reshaped()) v = u(rng) < 0.3 ? kNegInf : n(rng);
    e.col(0).setConstant(-3.0);
    const auto a = forward_backward(e, params);
    const auto b = forward_backward_dense(e, params);
    EXPECT_LT((a.gamma - b.gamma).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.log_evidence, b.log_evidence, 1e-12 * std::abs(b.log_evidence));
    EXPECT_LT((a.entry_counts - b.entry_counts).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(ForwardBackward, LongSequencesStayFinite) {
  HmmParams params = uniform_params(3, 0.99);
  Eigen::MatrixXd e = Eigen::MatrixXd::Constant(5000, 3, -800.0);
  e.col(1).setConstant(-805.0);
  const auto fb = forward_backward(e, params);
  EXPECT_TRUE(std::isfinite(fb.log_evidence));
  EXPECT_LT((fb.gamma.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(ForwardBackward, RowWithoutAllowedStateIsInfeasible) {
  Eigen::MatrixXd e(2, 2);
  e << 0.0, 0.0, kNegInf, kNegInf;
  try {
    forward_backward(e, uniform_params(2, 0.5));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kInfeasible);
  }
}

// ---------------------------------------------------------------- pi, ELBO

TEST(UpdatePi, Examples) {
  EXPECT_EQ(update_pi(Eigen::VectorXd::Constant(1, 4.0), uniform_params(1, 0.8), 1e-6).pi(0), 1.0);
  const auto two = update_pi(Eigen::Vector2d(3.0, 1.0), uniform_params(2, 0.8), 1e-6);
  EXPECT_DOUBLE_EQ(two.pi(0), 0.75);
  EXPECT_DOUBLE_EQ(two.pi(1), 0.25);
  const auto dropped = update_pi(Eigen::Vector2d(1.0, 1e-9), uniform_params(2, 0.8), 1e-6);
  EXPECT_EQ(dropped.pi(0), 1.0);
  EXPECT_EQ(dropped.pi(1), 0.0);
  EXPECT_EQ(dropped.retained_states(), 1u);
}

TEST(UpdatePi, DroppedStatesStayDropped) {
  HmmParams prev = uniform_params(3, 0.8);
  prev.pi << 0.5, 0.0, 0.5;
  const auto next = update_pi(Eigen::Vector3d(1.0, 5.0, 1.0), prev, 1e-6);
  EXPECT_EQ(next.pi(1), 0.0);
}

TEST(Elbo, PriorPosteriorHasZeroKl) {
  const std::vector<SpeakerPosterior> q(3, {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4)});
  EXPECT_EQ(kl_divergence(q[0]), 0.0);
  EXPECT_EQ(elbo(-12.5, q, InferenceConfig{}), -12.5);
}

TEST(Elbo, KlIsPositiveAwayFromPrior) {
  const SpeakerPosterior q{Eigen::Vector2d(0.5, -1.0), Eigen::Vector2d(3.0, 1.0)};
  const double expected = 0.5 * (1.0 / 3.0 + 0.25 - 1.0 + std::log(3.0)) + 0.5 * (1.0 + 1.0 - 1.0 + 0.0);
  EXPECT_NEAR(kl_divergence(q), expected, 1e-15);
}

// ---------------------------------------------------------------- full inference

TEST(RunMsvbx, OccupancyRowsRespectActiveCounts) {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    const auto p = oracle::random_hmm_problem(rng, 30, 4, 3, 8);
    const StateSpace sp(p.num_speakers, p.data.max_streams);
    const auto r = run_msvbx(p.data, sp, p.init_gamma, InferenceConfig{});
    for (std::size_t t = 0; t < p.data.num_chunks; ++t) {
      const std::size_t kt = p.data.active_counts[t];
      double mass = 0.0;
      for (std::size_t s = 0; s < sp.num_states(); ++s) {
        const double g = r.trace.gamma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
        if (sp.state_size(s) != kt) EXPECT_EQ(g, 0.0);
        else mass += g;
      }
      if (kt == 0) EXPECT_EQ(mass, 0.0);
      else EXPECT_NEAR(mass, 1.0, 1e-12);
    }
    EXPECT_TRUE(oracle::labels_respect_cannot_link(r.labels, p.data.max_streams));
    EXPECT_LE(r.speaker_count, p.num_speakers);
    for (const auto& q : r.posteriors) EXPECT_GE(q.precision.minCoeff(), 1.0);
  }
}

TEST(RunMsvbx, ElboNonDecreasing) {
  std::mt19937_64 rng(36);
  for (int k = 0; k < 30; ++k) {
    const auto p = oracle::random_hmm_problem(rng, 40, 5, 3, 10);
    InferenceConfig cfg;
    cfg.max_iters = 20;
    cfg.elbo_rel_tol = 0.0;
    const StateSpace sp(p.num_speakers, p.data.max_streams);
    const auto r = run_msvbx(p.data, sp, p.init_gamma, cfg);
    ASSERT_EQ(r.trace.iterations.size(), 20u);
    for (std::size_t i = 1; i < r.trace.iterations.size(); ++i) {
      EXPECT_GE(r.trace.iterations[i].elbo - r.trace.iterations[i - 1].elbo,
                -1e-8 * std::abs(r.trace.iterations[i - 1].elbo));
    }
  }
}

TEST(RunMsvbx, ZeroIterationsReturnsInitialLabels) {
  std::mt19937_64 rng(37);
  const auto p = oracle::random_hmm_problem(rng, 20, 3, 2, 4);
  InferenceConfig cfg;
  cfg.max_iters = 0;
  const StateSpace sp(p.num_speakers, p.data.max_streams);
  const auto r = run_msvbx(p.data, sp, p.init_gamma, cfg);
  EXPECT_TRUE(r.trace.iterations.empty());
  EXPECT_EQ(r.labels, hard_labels(sp, p.init_gamma, p.data));
}

TEST(RunMsvbx, SilentChunksGetNoLabels) {
  RowMatrix x = RowMatrix::Zero(6, 2);
  x.row(0) << 3.0, 0.0;
  x.row(4) << -3.0, 0.5;
  const auto data = make_stream_data({1, 0, 1}, 2, x, Eigen::Vector2d(4.0, 1.0));
  const StateSpace sp(2, 2);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(sp.num_states()));
  g(0, 0) = 0.9;
  g(0, 1) = 0.1;
  g(2, 0) = 0.1;
  g(2, 1) = 0.9;
  const auto r = run_msvbx(data, sp, g, InferenceConfig{});
  EXPECT_EQ(r.labels[2], -1);
  EXPECT_EQ(r.labels[3], -1);
  EXPECT_EQ(r.trace.gamma.row(1).sum(), 0.0);
  EXPECT_GE(r.labels[0], 0);
}

TEST(RunMsvbx, SwappingStreamsPermutesLabels) {
  std::mt19937_64 rng(38);
  int checked = 0;
  for (int k = 0; k < 15; ++k) {
    auto p = oracle::random_hmm_problem(rng, 30, 4, 2, 6);
    if (p.data.max_streams != 2 || p.num_speakers < 2) continue;
    const StateSpace sp(p.num_speakers, 2);
    // pi is shared over ordered tuples, so the swap must apply to every
    // two-speaker chunk for the model to be symmetric.
    RowMatrix x = p.data.x;
    Eigen::MatrixXd g = p.init_gamma;
    for (std::size_t t = 0; t < p.data.num_chunks; ++t) {
      if (p.data.active_counts[t] != 2) continue;
      x.row(static_cast<Eigen::Index>(2 * t)).swap(x.row(static_cast<Eigen::Index>(2 * t + 1)));
      for (std::size_t s : sp.states_of_size(2)) {
        const std::vector<int> rev{sp.speaker(s, 1), sp.speaker(s, 0)};
        g(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(*sp.find(rev))) =
            p.init_gamma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      }
    }
    ++checked;
    const auto swapped = make_stream_data(p.data.active_counts, 2, x, p.data.phi);
    const InferenceConfig cfg;
    const auto a = run_msvbx(p.data, sp, p.init_gamma, cfg);
    const auto b = run_msvbx(swapped, sp, g, cfg);
    ASSERT_EQ(a.trace.iterations.size(), b.trace.iterations.size());
    for (std::size_t i = 0; i < a.trace.iterations.size(); ++i) {
      EXPECT_NEAR(a.trace.iterations[i].elbo, b.trace.iterations[i].elbo, 1e-12 * std::abs(a.trace.iterations[i].elbo));
    }
    for (std::size_t t = 0; t < p.data.num_chunks; ++t) {
      const bool sw = p.data.active_counts[t] == 2;
      EXPECT_EQ(a.labels[2 * t], b.labels[2 * t + (sw ? 1 : 0)]);
      EXPECT_EQ(a.labels[2 * t + 1], b.labels[2 * t + (sw ? 0 : 1)]);
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(RunMsvbx, SpeakerCountNeverExceedsInitialClusters) {
  std::mt19937_64 rng(39);
  for (int k = 0; k < 20; ++k) {
    const auto p = oracle::random_hmm_problem(rng, 40, 5, 2, 8);
    const StateSpace sp(p.num_speakers, p.data.max_streams);
    const auto r = run_msvbx(p.data, sp, p.init_gamma, InferenceConfig{});
    EXPECT_LE(r.speaker_count, p.num_speakers);
    EXPECT_LE(r.trace.iterations.back().retained_speakers, p.num_speakers);
  }
}

TEST(RunMsvbx, ChunkWiderThanStateSpaceIsInfeasible) {
  RowMatrix x = RowMatrix::Ones(2, 1);
  const auto data = make_stream_data({2}, 2, x, Eigen::VectorXd::Ones(1));
  const StateSpace sp(1, 2);
  try {
    run_msvbx(data, sp, Eigen::MatrixXd::Zero(1, 1), InferenceConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(HardLabels, TiesGoToLowestState) {
  RowMatrix x = RowMatrix::Ones(1, 1);
  const auto data = make_stream_data({1}, 1, x, Eigen::VectorXd::Ones(1));
  const StateSpace sp(3, 1);
  Eigen::MatrixXd g(1, 3);
  g << 0.2, 0.4, 0.4;
  EXPECT_EQ(hard_labels(sp, g, data), std::vector<int>{1});
}

TEST(RunVbx, MatchesMultiStreamOnSingleStreamInput) {
  std::mt19937_64 rng(40);
  for (int k = 0; k < 10; ++k) {
    const auto p = oracle::random_hmm_problem(rng, 40, 4, 1, 8);
    const StateSpace sp(p.num_speakers, 1);
    const auto a = run_msvbx(p.data, sp, p.init_gamma, InferenceConfig{}, true);
    const auto b = run_vbx(p.data, p.num_speakers, p.init_gamma, InferenceConfig{}, true);
    ASSERT_EQ(a.trace.gamma_history.size(), b.trace.gamma_history.size());
    for (std::size_t i = 0; i < a.trace.gamma_history.size(); ++i) {
      EXPECT_LT((a.trace.gamma_history[i] - b.trace.gamma_history[i]).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((a.trace.pi_history[i] - b.trace.pi_history[i]).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_EQ(a.labels, b.labels);
  }
}

TEST(RunVbx, RejectsOverlappedChunks) {
  RowMatrix x = RowMatrix::Ones(2, 1);
  const auto data = make_stream_data({2}, 2, x, Eigen::VectorXd::Ones(1));
  EXPECT_THROW(run_vbx(data, 2, Eigen::MatrixXd::Constant(1, 2, 0.5), InferenceConfig{}), Error);
}
