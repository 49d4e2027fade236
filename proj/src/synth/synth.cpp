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
#include <random>

#include "msvbx/assignment.hpp"
#include "msvbx/error.hpp"
#include "msvbx/state_space.hpp"
#include "msvbx/synth.hpp"

namespace msvbx {

Eigen::VectorXd linear_phi(std::size_t dim, double first, double last) {
  if (dim == 1) return Eigen::VectorXd::Constant(1, first);
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(dim), first, last);
}

Eigen::VectorXd SynthConfig::resolved_phi() const {
  return phi.size() == 0 ? linear_phi(embed_dim, 10.0, 1.0) : phi;
}

std::vector<double> SynthConfig::resolved_active_probs() const {
  if (!active_count_probs.empty()) return active_count_probs;
  std::vector<double> probs(max_streams + 1, 1.0 / static_cast<double>(max_streams));
  probs[0] = 0.0;
  return probs;
}

void SynthConfig::validate() const {
  if (num_speakers == 0 || num_chunks == 0 || max_streams == 0 || embed_dim == 0 ||
      frames_per_chunk == 0) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic dimensions must be positive");
  }
  const Eigen::VectorXd p = resolved_phi();
  if (static_cast<std::size_t>(p.size()) != embed_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "phi length must equal embed_dim");
  }
  if ((p.array() < 0.0).any()) throw Error(ErrorCode::kInvalidArgument, "phi must be non-negative");
  if (!(p_loop >= 0.0 && p_loop < 1.0)) throw Error(ErrorCode::kInvalidArgument, "p_loop must lie in [0,1)");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "flip probability must lie in [0,1]");
  }
  const auto probs = resolved_active_probs();
  if (probs.size() != max_streams + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "active count distribution needs max_streams + 1 entries");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative probability");
    if (probs[k] > 0.0 && k > num_speakers) {
      throw Error(ErrorCode::kInvalidArgument, "active count " + std::to_string(k) +
                                                   " exceeds the number of speakers");
    }
    sum += probs[k];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidArgument, "probabilities must sum to 1");
}

SynthRecording generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::VectorXd phi = cfg.resolved_phi();
  const Eigen::VectorXd scale = phi.cwiseSqrt();
  const auto probs = cfg.resolved_active_probs();
  std::discrete_distribution<std::size_t> count_dist(probs.begin(), probs.end());

  const std::size_t T = cfg.num_chunks;
  const std::size_t C = cfg.max_streams;
  const std::size_t D = cfg.embed_dim;
  const std::size_t N = cfg.frames_per_chunk;
  const StateSpace space(cfg.num_speakers, C);

  SynthRecording out;
  out.speaker_latents.resize(static_cast<Eigen::Index>(cfg.num_speakers), static_cast<Eigen::Index>(D));
  for (Eigen::Index g = 0; g < out.speaker_latents.rows(); ++g) {
    for (Eigen::Index d = 0; d < out.speaker_latents.cols(); ++d) out.speaker_latents(g, d) = normal(rng);
  }

  std::vector<float> activities(T * C * N, 0.0F);
  std::vector<float> embeddings(T * C * D, 0.0F);
  out.labels.assign(T * C, -1);
  out.state_sequence.assign(T, -1);
  std::vector<char> seen(cfg.num_speakers, 0);
  std::vector<std::size_t> positions(C);

  long previous = -1;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t k = count_dist(rng);
    if (k > 0) {
      const bool stay = previous >= 0 && space.state_size(static_cast<std::size_t>(previous)) == k &&
                        uniform(rng) < cfg.p_loop;
      std::size_t state = static_cast<std::size_t>(previous);
      if (!stay) {
        const auto peers = space.states_of_size(k);
        std::uniform_int_distribution<std::size_t> pick(0, peers.size() - 1);
        state = peers[pick(rng)];
      }
      previous = static_cast<long>(state);
      out.state_sequence[t] = static_cast<int>(state);

      // Active speakers land on randomly chosen stream positions.
      std::iota(positions.begin(), positions.end(), std::size_t{0});
      std::shuffle(positions.begin(), positions.end(), rng);
      std::sort(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(k));
      for (std::size_t c = 0; c < k; ++c) {
        const int g = space.speaker(state, c);
        out.labels[t * C + positions[c]] = g;
        seen[static_cast<std::size_t>(g)] = 1;
      }
    }
    for (std::size_t c = 0; c < C; ++c) {
      const int g = out.labels[t * C + c];
      float* emb = &embeddings[(t * C + c) * D];
      for (std::size_t d = 0; d < D; ++d) {
        const double mean = g >= 0 ? scale[static_cast<Eigen::Index>(d)] *
                                         out.speaker_latents(g, static_cast<Eigen::Index>(d))
                                   : 0.0;
        emb[d] = static_cast<float>(mean + normal(rng));
      }
      float* act = &activities[(t * C + c) * N];
      for (std::size_t n = 0; n < N; ++n) {
        bool on = g >= 0;
        if (cfg.flip_prob > 0.0 && uniform(rng) < cfg.flip_prob) on = !on;
        act[n] = on ? 1.0F : 0.0F;
      }
    }
  }
  out.num_speakers = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
  out.recording = ChunkedRecording(cfg.recording_id, {T, C, D, N}, cfg.frame_step,
                                   std::move(activities), std::move(embeddings));
  return out;
}

LabeledEmbeddings generate_labeled(const Eigen::VectorXd& phi, std::size_t num_speakers,
                                   std::size_t per_speaker, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index D = phi.size();
  const Eigen::VectorXd scale = phi.cwiseSqrt();
  LabeledEmbeddings data;
  data.vectors.resize(static_cast<Eigen::Index>(num_speakers * per_speaker), D);
  Eigen::VectorXd y(D);
  Eigen::Index row = 0;
  for (std::size_t g = 0; g < num_speakers; ++g) {
    for (Eigen::Index d = 0; d < D; ++d) y[d] = normal(rng);
    for (std::size_t i = 0; i < per_speaker; ++i, ++row) {
      for (Eigen::Index d = 0; d < D; ++d) data.vectors(row, d) = scale[d] * y[d] + normal(rng);
      data.speaker_labels.push_back(static_cast<int>(g));
    }
  }
  return data;
}

double label_error_rate(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "label sequences differ in length");
  }
  std::map<int, Eigen::Index> truth_index, pred_index;
  std::size_t total = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 && predicted[i] < 0) continue;
    ++total;
    if (truth[i] >= 0) truth_index.emplace(truth[i], 0);
    if (predicted[i] >= 0) pred_index.emplace(predicted[i], 0);
  }
  if (total == 0) return 0.0;
  Eigen::Index next = 0;
  for (auto& [label, idx] : truth_index) idx = next++;
  next = 0;
  for (auto& [label, idx] : pred_index) idx = next++;

  Eigen::MatrixXd matches = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(truth_index.size()),
                                                  static_cast<Eigen::Index>(pred_index.size()));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= 0 && predicted[i] >= 0) matches(truth_index[truth[i]], pred_index[predicted[i]]) += 1.0;
  }
  const double matched = assignment_weight(matches, max_weight_assignment(matches));
  return 1.0 - matched / static_cast<double>(total);
}

nlohmann::json truth_json(const SynthRecording& synth, std::size_t num_streams) {
  nlohmann::json labels = nlohmann::json::array();
  for (std::size_t t = 0; t * num_streams < synth.labels.size(); ++t) {
    labels.push_back(std::vector<int>(synth.labels.begin() + static_cast<std::ptrdiff_t>(t * num_streams),
                                      synth.labels.begin() + static_cast<std::ptrdiff_t>((t + 1) * num_streams)));
  }
  return {{"labels", std::move(labels)},
          {"num_speakers", synth.num_speakers},
          {"state_sequence", synth.state_sequence}};
}

}  // namespace msvbx
