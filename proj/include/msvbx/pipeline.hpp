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

#include <optional>
#include <string>
#include <vector>

#include "msvbx/cahc.hpp"
#include "msvbx/core.hpp"
#include "msvbx/plda.hpp"
#include "msvbx/stitch.hpp"
#include "msvbx/vb.hpp"

namespace msvbx {

enum class ClusterMode { kMsvbx, kVbx };

struct PipelineConfig {
  InferenceConfig inference;
  double ahc_threshold = 0.8;
  std::size_t lda_dim = 32;
  double activity_threshold = kDefaultActivityThreshold;
  double median_window = 1.0;  // seconds; <= 0 disables the filter
  /// When set, cAHC ignores the threshold and merges down to this many clusters.
  std::optional<std::size_t> init_clusters;
  double init_smoothing = kDefaultInitSmoothing;
  ClusterMode mode = ClusterMode::kMsvbx;
};

struct ClusterOutcome {
  ChunkedRecording canonical;
  ClusterAssignment init;
  VbResult vb;
  std::vector<int> labels;         // T x C over canonical stream positions
  std::vector<int> source_labels;  // T x C over the recording's original stream order
  DiarizationResult diarization;
  std::size_t speaker_count = 0;
};

/// Active-stream detection, projection, cAHC, occupancy init, VB inference,
/// stitching and median filtering for one recording.
ClusterOutcome cluster_recording(const ChunkedRecording& recording, const PldaBackend& backend,
                                 const PipelineConfig& cfg);

/// L2-normalized projected embeddings of the active streams, one row per
/// flat index of index_active_streams().
Eigen::MatrixXd ahc_points(const StreamData& data);

/// One JSON object per VB iteration followed by a summary object.
std::string diagnostics_jsonl(const ClusterOutcome& outcome);

}  // namespace msvbx
