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
#include <limits>
#include <numbers>
#include <set>

#include "msvbx/error.hpp"
#include "msvbx/kernels.hpp"
#include "msvbx/vb.hpp"

namespace msvbx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::size_t> active_chunks(const StreamData& data) {
  std::vector<std::size_t> chunks;
  for (std::size_t t = 0; t < data.num_chunks; ++t) {
    if (data.active_counts[t] > 0) chunks.push_back(t);
  }
  return chunks;
}

void scatter_rows(const Eigen::MatrixXd& compact, std::span<const std::size_t> rows,
                  Eigen::MatrixXd& full) {
  full.setZero();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    full.row(static_cast<Eigen::Index>(rows[i])) = compact.row(static_cast<Eigen::Index>(i));
  }
}

std::size_t count_distinct(std::span<const int> labels) {
  std::set<int> seen;
  for (int l : labels) {
    if (l >= 0) seen.insert(l);
  }
  return seen.size();
}

std::size_t retained_speakers(const StateSpace& space, const HmmParams& params) {
  std::vector<char> seen(space.num_speakers(), 0);
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    if (params.pi[static_cast<Eigen::Index>(s)] <= 0.0) continue;
    for (int g : space.state(s)) seen[static_cast<std::size_t>(g)] = 1;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
}

}  // namespace

std::size_t StreamData::max_active_count() const {
  return active_counts.empty() ? 0 : *std::max_element(active_counts.begin(), active_counts.end());
}

StreamData make_stream_data(std::vector<std::size_t> active_counts, std::size_t max_streams,
                            RowMatrix x, Eigen::VectorXd phi) {
  StreamData data;
  data.num_chunks = active_counts.size();
  data.max_streams = max_streams;
  data.dim = static_cast<std::size_t>(phi.size());
  if (static_cast<std::size_t>(x.rows()) != data.num_chunks * max_streams ||
      static_cast<std::size_t>(x.cols()) != data.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding matrix must be (T*C) x dim(phi)");
  }
  if ((phi.array() < 0.0).any()) throw Error(ErrorCode::kInvalidArgument, "phi must be non-negative");
  for (std::size_t k : active_counts) {
    if (k > max_streams) throw Error(ErrorCode::kInvalidArgument, "active count exceeds stream count");
  }
  data.active_counts = std::move(active_counts);
  data.rho = x.array().rowwise() * phi.cwiseSqrt().transpose().array();
  data.x_sqnorm = x.rowwise().squaredNorm();
  data.x = std::move(x);
  data.phi = std::move(phi);
  return data;
}

StreamData make_stream_data(const ChunkedRecording& canonical, const PldaBackend& backend) {
  if (!canonical.canonical()) {
    throw Error(ErrorCode::kInvalidArgument, "recording must pass detect_active_streams first");
  }
  const std::size_t C = canonical.num_streams();
  RowMatrix x = RowMatrix::Zero(static_cast<Eigen::Index>(canonical.num_chunks() * C),
                                static_cast<Eigen::Index>(backend.lda_dim));
  for (std::size_t t = 0; t < canonical.num_chunks(); ++t) {
    for (std::size_t c = 0; c < canonical.active_count(t); ++c) {
      x.row(static_cast<Eigen::Index>(t * C + c)) = backend.project(canonical.embedding(t, c)).transpose();
    }
  }
  std::vector<std::size_t> counts(canonical.active_counts().begin(), canonical.active_counts().end());
  return make_stream_data(std::move(counts), C, std::move(x), backend.phi);
}

std::vector<SpeakerPosterior> update_speaker_posteriors(const StateSpace& space,
                                                        const Eigen::MatrixXd& gamma,
                                                        const StreamData& data,
                                                        const InferenceConfig& cfg) {
  const std::size_t G = space.num_speakers();
  const auto D = static_cast<Eigen::Index>(data.dim);
  if (static_cast<std::size_t>(gamma.rows()) != data.num_chunks ||
      static_cast<std::size_t>(gamma.cols()) != space.num_states()) {
    throw Error(ErrorCode::kDimensionMismatch, "occupancy must be T x S");
  }
  std::vector<double> occupancy(G, 0.0);
  std::vector<Eigen::VectorXd> weighted(G, Eigen::VectorXd::Zero(D));
  std::vector<double> stream_weight(G);

  for (std::size_t t = 0; t < data.num_chunks; ++t) {
    const std::size_t k = data.active_counts[t];
    const auto states = space.states_of_size(k);
    for (std::size_t c = 0; c < k; ++c) {
      std::fill(stream_weight.begin(), stream_weight.end(), 0.0);
      for (std::size_t s : states) {
        stream_weight[static_cast<std::size_t>(space.speaker(s, c))] +=
            gamma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      }
      const auto rho = data.rho_row(t, c);
      for (std::size_t g = 0; g < G; ++g) {
        if (stream_weight[g] == 0.0) continue;
        occupancy[g] += stream_weight[g];
        kernels::axpy(stream_weight[g], rho, {weighted[g].data(), data.dim});
      }
    }
  }

  const double ratio = cfg.fa / cfg.fb;
  std::vector<SpeakerPosterior> out(G);
  for (std::size_t g = 0; g < G; ++g) {
    out[g].precision = (1.0 + ratio * occupancy[g] * data.phi.array()).matrix();
    out[g].alpha = (ratio * weighted[g].array() / out[g].precision.array()).matrix();
  }
  return out;
}

Eigen::VectorXd state_log_emission(const StateSpace& space,
                                   std::span<const SpeakerPosterior> posteriors,
                                   const StreamData& data, std::size_t t,
                                   const InferenceConfig& cfg) {
  const std::size_t k = data.active_counts.at(t);
  if (k > space.max_state_size()) {
    throw Error(ErrorCode::kInfeasible, "chunk " + std::to_string(t) + " has " + std::to_string(k) +
                                            " active streams but states hold at most " +
                                            std::to_string(space.max_state_size()));
  }
  const std::size_t G = space.num_speakers();
  Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.num_states()), kNegInf);
  if (k == 0) return out;

  // -1/2 tr(Phi (L^-1 + alpha alpha^T)) per speaker.
  std::vector<double> trace_term(G);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& q = posteriors[g];
    trace_term[g] =
        -0.5 * (data.phi.array() * (q.precision.array().inverse() + q.alpha.array().square())).sum();
  }
  const double log_norm = 0.5 * static_cast<double>(data.dim) * std::log(2.0 * std::numbers::pi);
  std::vector<double> stream_score(k * G);
  for (std::size_t c = 0; c < k; ++c) {
    const auto rho = data.rho_row(t, c);
    const double base = -log_norm - 0.5 * data.x_sqnorm[static_cast<Eigen::Index>(t * data.max_streams + c)];
    for (std::size_t g = 0; g < G; ++g) {
      stream_score[c * G + g] =
          kernels::dot({posteriors[g].alpha.data(), data.dim}, rho) + trace_term[g] + base;
    }
  }
  for (std::size_t s : space.states_of_size(k)) {
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      sum += stream_score[c * G + static_cast<std::size_t>(space.speaker(s, c))];
    }
    out[static_cast<Eigen::Index>(s)] = cfg.fa * sum;
  }
  return out;
}

double kl_divergence(const SpeakerPosterior& q) {
  const Eigen::ArrayXd l = q.precision.array();
  return 0.5 * (l.inverse() + q.alpha.array().square() - 1.0 + l.log()).sum();
}

double elbo(double log_evidence, std::span<const SpeakerPosterior> posteriors,
            const InferenceConfig& cfg) {
  double kl = 0.0;
  for (const auto& q : posteriors) kl += kl_divergence(q);
  return log_evidence - cfg.fb * kl;
}

double occupancy_bound(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& log_emissions,
                       std::span<const SpeakerPosterior> posteriors, const InferenceConfig& cfg) {
  double expected = 0.0;
  for (Eigen::Index t = 0; t < gamma.rows(); ++t) {
    for (Eigen::Index s = 0; s < gamma.cols(); ++s) {
      if (gamma(t, s) > 0.0) expected += gamma(t, s) * log_emissions(t, s);
    }
  }
  return elbo(expected, posteriors, cfg);
}

std::vector<int> hard_labels(const StateSpace& space, const Eigen::MatrixXd& gamma,
                             const StreamData& data) {
  std::vector<int> labels(data.num_chunks * data.max_streams, -1);
  for (std::size_t t = 0; t < data.num_chunks; ++t) {
    const std::size_t k = data.active_counts[t];
    if (k == 0) continue;
    std::size_t best = space.num_states();
    double best_val = -1.0;
    for (std::size_t s : space.states_of_size(k)) {
      const double v = gamma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      if (v > best_val) {
        best_val = v;
        best = s;
      }
    }
    for (std::size_t c = 0; c < k; ++c) labels[t * data.max_streams + c] = space.speaker(best, c);
  }
  return labels;
}

VbResult run_msvbx(const StreamData& data, const StateSpace& space,
                   const Eigen::MatrixXd& init_gamma, const InferenceConfig& cfg,
                   bool record_history) {
  cfg.validate();
  const auto S = static_cast<Eigen::Index>(space.num_states());
  if (init_gamma.rows() != static_cast<Eigen::Index>(data.num_chunks) || init_gamma.cols() != S) {
    throw Error(ErrorCode::kDimensionMismatch, "initial occupancy must be T x S");
  }
  if (data.max_active_count() > space.max_state_size()) {
    throw Error(ErrorCode::kInfeasible, "state space cannot hold the largest active stream count");
  }
  const std::vector<std::size_t> chunks = active_chunks(data);

  VbResult result;
  VbTrace& trace = result.trace;
  trace.gamma = init_gamma;
  trace.params = uniform_params(space.num_states(), cfg.p_loop);
  result.posteriors = update_speaker_posteriors(space, trace.gamma, data, cfg);

  Eigen::MatrixXd log_e(static_cast<Eigen::Index>(chunks.size()), S);
  for (std::size_t it = 0; it < cfg.max_iters && !chunks.empty(); ++it) {
    if (it > 0) result.posteriors = update_speaker_posteriors(space, trace.gamma, data, cfg);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      log_e.row(static_cast<Eigen::Index>(i)) =
          state_log_emission(space, result.posteriors, data, chunks[i], cfg).transpose();
    }
    const ForwardBackwardResult fb = forward_backward(log_e, trace.params);
    scatter_rows(fb.gamma, chunks, trace.gamma);
    if (record_history) {
      trace.gamma_history.push_back(trace.gamma);
      trace.pi_history.push_back(trace.params.pi);
    }
    const double value = elbo(fb.log_evidence, result.posteriors, cfg);
    trace.params = update_pi(fb.entry_counts, trace.params, cfg.pi_drop_eps);
    trace.iterations.push_back({value, trace.params.retained_states(),
                                retained_speakers(space, trace.params)});
    if (it > 0) {
      const double previous = trace.iterations[it - 1].elbo;
      if (std::abs(value - previous) < cfg.elbo_rel_tol * std::abs(value)) {
        trace.converged = true;
        break;
      }
    }
  }

  result.labels = hard_labels(space, trace.gamma, data);
  result.speaker_count = count_distinct(result.labels);
  return result;
}

}  // namespace msvbx
