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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace msvbx {

struct RecordingShape {
  std::size_t num_chunks = 0;        // T
  std::size_t num_streams = 0;       // C
  std::size_t embed_dim = 0;         // D
  std::size_t frames_per_chunk = 0;  // N

  bool operator==(const RecordingShape&) const = default;
};

/// Multi-stream output of a chunked diarization front-end: per chunk and
/// stream, one frame-level activity track and one speaker embedding.
///
/// A freshly constructed recording treats every stream as active. After
/// detect_active_streams() the active streams of chunk t occupy positions
/// 0..active_count(t)-1 and original_stream(t, c) maps each position back to
/// the stream index of the source data.
class ChunkedRecording {
 public:
  ChunkedRecording() = default;
  ChunkedRecording(std::string id, RecordingShape shape, float frame_step,
                   std::vector<float> activities, std::vector<float> embeddings);

  const std::string& id() const noexcept { return id_; }
  const RecordingShape& shape() const noexcept { return shape_; }
  std::size_t num_chunks() const noexcept { return shape_.num_chunks; }
  std::size_t num_streams() const noexcept { return shape_.num_streams; }
  std::size_t embed_dim() const noexcept { return shape_.embed_dim; }
  std::size_t frames_per_chunk() const noexcept { return shape_.frames_per_chunk; }
  float frame_step() const noexcept { return frame_step_; }

  std::span<const float> activity(std::size_t t, std::size_t c) const;
  std::span<const float> embedding(std::size_t t, std::size_t c) const;
  std::span<const float> activities() const noexcept { return activities_; }
  std::span<const float> embeddings() const noexcept { return embeddings_; }

  std::size_t active_count(std::size_t t) const { return active_counts_.at(t); }
  std::span<const std::size_t> active_counts() const noexcept { return active_counts_; }
  std::size_t max_active_count() const noexcept;
  std::size_t original_stream(std::size_t t, std::size_t c) const;
  bool canonical() const noexcept { return canonical_; }

  ChunkedRecording with_id(std::string id) const;

 private:
  friend ChunkedRecording detect_active_streams(const ChunkedRecording&, double);

  std::string id_;
  RecordingShape shape_;
  float frame_step_ = 0.0F;
  std::vector<float> activities_;   // T x C x N
  std::vector<float> embeddings_;   // T x C x D
  std::vector<std::size_t> active_counts_;
  std::vector<std::size_t> stream_order_;  // T x C, position -> source stream
  bool canonical_ = false;
};

struct InferenceConfig {
  double fa = 0.4;
  double fb = 17.0;
  double p_loop = 0.8;
  double tau = 0.05;
  std::size_t max_iters = 40;
  double elbo_rel_tol = 1e-6;  // 0 runs all max_iters cycles
  double pi_drop_eps = 1e-6;
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidArgument) when a field is out of range.
  void validate() const;
};

/// Number of streams per chunk whose mean activity is >= tau.
std::vector<std::size_t> count_active_streams(const ChunkedRecording& rec, double tau);

/// Returns a copy with active streams moved to the front of each chunk (stable
/// within the active and inactive groups) and active counts filled in.
ChunkedRecording detect_active_streams(const ChunkedRecording& rec, double tau);

// MSVB1 interchange format.
inline constexpr char kMsvbMagic[] = "MSVB1\n";

ChunkedRecording read_recording(std::istream& in, std::string id);
ChunkedRecording read_recording(const std::filesystem::path& path);
void write_recording(const ChunkedRecording& rec, std::ostream& out);
void write_recording(const ChunkedRecording& rec, const std::filesystem::path& path);

}  // namespace msvbx
