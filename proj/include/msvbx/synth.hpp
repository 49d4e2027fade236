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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "msvbx/core.hpp"
#include "msvbx/plda.hpp"

namespace msvbx {

struct SynthConfig {
  std::string recording_id = "synth";
  std::size_t num_speakers = 3;
  std::size_t num_chunks = 200;
  std::size_t max_streams = 2;
  std::size_t embed_dim = 32;
  Eigen::VectorXd phi;  // empty: linearly spaced 10 -> 1 over embed_dim
  double p_loop = 0.8;
  /// Probability of 0..max_streams active speakers per chunk; empty: only
  /// counts 1..max_streams, uniformly.
  std::vector<double> active_count_probs;
  std::size_t frames_per_chunk = 50;
  float frame_step = 0.1F;
  /// Independent per-frame probability of flipping an activity value.
  double flip_prob = 0.0;
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidArgument) for inconsistent settings.
  void validate() const;
  Eigen::VectorXd resolved_phi() const;
  std::vector<double> resolved_active_probs() const;
};

Eigen::VectorXd linear_phi(std::size_t dim, double first, double last);

struct SynthRecording {
  ChunkedRecording recording;
  std::vector<int> labels;          // T x C in source stream order, -1 inactive
  std::vector<int> state_sequence;  // state index per chunk, -1 for silent chunks
  std::size_t num_speakers = 0;     // speakers that actually occur
  Eigen::MatrixXd speaker_latents;  // y_g, one row per speaker
};

/// Samples a recording from the multi-stream generative model: y_g ~ N(0, I),
/// loop-mixture state sequence over ordered speaker tuples, embeddings
/// N(phi^1/2 ∘ y_g, I), activities 1 on active streams and 0 elsewhere.
SynthRecording generate(const SynthConfig& cfg);

/// Labeled set from the same model, for backend training.
LabeledEmbeddings generate_labeled(const Eigen::VectorXd& phi, std::size_t num_speakers,
                                   std::size_t per_speaker, std::uint64_t seed);

/// Minimum over speaker relabelings of the fraction of mismatched labels,
/// counted over positions where either side is labeled (>= 0).
double label_error_rate(std::span<const int> truth, std::span<const int> predicted);

nlohmann::json truth_json(const SynthRecording& synth, std::size_t num_streams);

}  // namespace msvbx
