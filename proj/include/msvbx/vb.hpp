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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "msvbx/core.hpp"
#include "msvbx/plda.hpp"
#include "msvbx/state_space.hpp"

namespace msvbx {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Model-space inputs of one recording. Row t*C + c of `x` holds the projected
/// embedding of canonical stream c of chunk t (zero for inactive streams);
/// `rho` is the same row scaled by sqrt(phi).
struct StreamData {
  std::size_t num_chunks = 0;
  std::size_t max_streams = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> active_counts;
  RowMatrix x;
  RowMatrix rho;
  Eigen::VectorXd x_sqnorm;
  Eigen::VectorXd phi;

  std::span<const double> rho_row(std::size_t t, std::size_t c) const {
    return {rho.row(static_cast<Eigen::Index>(t * max_streams + c)).data(), dim};
  }
  std::size_t max_active_count() const;
};

StreamData make_stream_data(std::vector<std::size_t> active_counts, std::size_t max_streams,
                            RowMatrix x, Eigen::VectorXd phi);
StreamData make_stream_data(const ChunkedRecording& canonical, const PldaBackend& backend);

/// q(y_g) = N(alpha, diag(precision)^-1).
struct SpeakerPosterior {
  Eigen::VectorXd alpha;
  Eigen::VectorXd precision;
};

struct HmmParams {
  Eigen::VectorXd pi;  // zero entries are dropped states
  double p_loop = 0.8;

  std::size_t retained_states() const;
};

HmmParams uniform_params(std::size_t num_states, double p_loop);

/// Closed-form q(Y) update for a fixed T x S occupancy (rows of chunks with
/// no active stream must be zero).
std::vector<SpeakerPosterior> update_speaker_posteriors(const StateSpace& space,
                                                        const Eigen::MatrixXd& gamma,
                                                        const StreamData& data,
                                                        const InferenceConfig& cfg);

/// Expected log-likelihood of chunk t under every state, scaled by F_A.
/// States whose size differs from the chunk's active count get -inf.
Eigen::VectorXd state_log_emission(const StateSpace& space,
                                   std::span<const SpeakerPosterior> posteriors,
                                   const StreamData& data, std::size_t t,
                                   const InferenceConfig& cfg);

struct ForwardBackwardResult {
  Eigen::MatrixXd gamma;         // rows x S state posteriors
  double log_evidence = 0.0;
  Eigen::VectorXd entry_counts;  // expected entries through the non-emitting node
};

/// Forward-backward for p(z_t=s | z_{t-1}=s') = (1-P_loop)*pi_s + [s=s']*P_loop
/// with initial distribution pi. O(T*S) per pass. Throws Error(kInfeasible)
/// when a row has no reachable state.
ForwardBackwardResult forward_backward(const Eigen::MatrixXd& log_emissions,
                                       const HmmParams& params);

/// Same posteriors from the explicit S x S transition matrix, O(T*S^2).
ForwardBackwardResult forward_backward_dense(const Eigen::MatrixXd& log_emissions,
                                             const HmmParams& params);

/// pi proportional to the entry counts; states below eps are dropped and the
/// rest renormalized. Throws Error(kDegenerateModel) if nothing survives.
HmmParams update_pi(const Eigen::VectorXd& entry_counts, const HmmParams& previous, double eps);

/// KL(q(y_g) || N(0, I)).
double kl_divergence(const SpeakerPosterior& q);

/// log_evidence - F_B * sum_g KL(q(y_g) || N(0, I)).
double elbo(double log_evidence, std::span<const SpeakerPosterior> posteriors,
            const InferenceConfig& cfg);

/// The part of the variational bound that depends on q(Y) for a fixed
/// occupancy: sum_{t,s} gamma * log_emission - F_B * sum_g KL.
double occupancy_bound(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& log_emissions,
                       std::span<const SpeakerPosterior> posteriors, const InferenceConfig& cfg);

struct VbIteration {
  double elbo = 0.0;
  std::size_t retained_states = 0;
  std::size_t retained_speakers = 0;
};

struct VbTrace {
  std::vector<VbIteration> iterations;
  Eigen::MatrixXd gamma;  // T x S, zero rows for skipped chunks
  HmmParams params;       // after the last update
  bool converged = false;
  // Filled only when history is requested.
  std::vector<Eigen::MatrixXd> gamma_history;
  std::vector<Eigen::VectorXd> pi_history;  // pi used by each forward-backward pass
};

struct VbResult {
  VbTrace trace;
  std::vector<SpeakerPosterior> posteriors;
  std::vector<int> labels;  // T x C over canonical stream positions, -1 if inactive
  std::size_t speaker_count = 0;
};

/// Hard labels Spk(argmax_s gamma_ts, c); ties go to the lowest state index.
std::vector<int> hard_labels(const StateSpace& space, const Eigen::MatrixXd& gamma,
                             const StreamData& data);

/// Multi-stream VB inference starting from an initial T x S occupancy.
VbResult run_msvbx(const StreamData& data, const StateSpace& space,
                   const Eigen::MatrixXd& init_gamma, const InferenceConfig& cfg,
                   bool record_history = false);

/// Single-stream VBx over inputs with at most one active stream per chunk,
/// written directly in matrix form with a dense transition matrix.
/// init_gamma is T x num_speakers.
VbResult run_vbx(const StreamData& data, std::size_t num_speakers,
                 const Eigen::MatrixXd& init_gamma, const InferenceConfig& cfg,
                 bool record_history = false);

}  // namespace msvbx
