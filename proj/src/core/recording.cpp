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
#include <numeric>

#include "msvbx/core.hpp"
#include "msvbx/error.hpp"

namespace msvbx {

ChunkedRecording::ChunkedRecording(std::string id, RecordingShape shape,
                                   float frame_step, std::vector<float> activities,
                                   std::vector<float> embeddings)
    : id_(std::move(id)),
      shape_(shape),
      frame_step_(frame_step),
      activities_(std::move(activities)),
      embeddings_(std::move(embeddings)) {
  const std::size_t tc = shape_.num_chunks * shape_.num_streams;
  if (activities_.size() != tc * shape_.frames_per_chunk) {
    throw Error(ErrorCode::kDimensionMismatch, "activity buffer does not match T*C*N");
  }
  if (embeddings_.size() != tc * shape_.embed_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding buffer does not match T*C*D");
  }
  if (!(frame_step_ > 0.0F) || !std::isfinite(frame_step_)) {
    throw Error(ErrorCode::kInvalidArgument, "frame_step must be positive");
  }
  for (float a : activities_) {
    if (!(a >= 0.0F && a <= 1.0F)) {
      throw Error(ErrorCode::kInvalidArgument, "activity values must lie in [0,1]");
    }
  }
  active_counts_.assign(shape_.num_chunks, shape_.num_streams);
  stream_order_.resize(tc);
  for (std::size_t t = 0; t < shape_.num_chunks; ++t) {
    std::iota(stream_order_.begin() + t * shape_.num_streams,
              stream_order_.begin() + (t + 1) * shape_.num_streams, std::size_t{0});
  }
}

std::span<const float> ChunkedRecording::activity(std::size_t t, std::size_t c) const {
  const std::size_t n = shape_.frames_per_chunk;
  return std::span<const float>(activities_).subspan((t * shape_.num_streams + c) * n, n);
}

std::span<const float> ChunkedRecording::embedding(std::size_t t, std::size_t c) const {
  const std::size_t d = shape_.embed_dim;
  return std::span<const float>(embeddings_).subspan((t * shape_.num_streams + c) * d, d);
}

std::size_t ChunkedRecording::max_active_count() const noexcept {
  return active_counts_.empty()
             ? 0
             : *std::max_element(active_counts_.begin(), active_counts_.end());
}

std::size_t ChunkedRecording::original_stream(std::size_t t, std::size_t c) const {
  return stream_order_.at(t * shape_.num_streams + c);
}

ChunkedRecording ChunkedRecording::with_id(std::string id) const {
  ChunkedRecording copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

void InferenceConfig::validate() const {
  if (!(fa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "F_A must be positive");
  if (!(fb > 0.0)) throw Error(ErrorCode::kInvalidArgument, "F_B must be positive");
  if (!(p_loop > 0.0 && p_loop < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "P_loop must lie in (0,1)");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0,1)");
  if (!(elbo_rel_tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "elbo_rel_tol must be non-negative");
  if (!(pi_drop_eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pi_drop_eps must be positive");
}

namespace {

bool stream_is_active(std::span<const float> track, double tau) {
  if (track.empty()) return false;
  double sum = 0.0;
  for (float a : track) sum += a;
  return sum / static_cast<double>(track.size()) >= tau;
}

}  // namespace

std::vector<std::size_t> count_active_streams(const ChunkedRecording& rec, double tau) {
  std::vector<std::size_t> counts(rec.num_chunks(), 0);
  for (std::size_t t = 0; t < rec.num_chunks(); ++t) {
    for (std::size_t c = 0; c < rec.num_streams(); ++c) {
      if (stream_is_active(rec.activity(t, c), tau)) ++counts[t];
    }
  }
  return counts;
}

ChunkedRecording detect_active_streams(const ChunkedRecording& rec, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0,1)");
  const RecordingShape& shape = rec.shape();
  const std::size_t C = shape.num_streams;
  const std::size_t N = shape.frames_per_chunk;
  const std::size_t D = shape.embed_dim;

  ChunkedRecording out = rec;
  std::vector<std::size_t> order(C);
  for (std::size_t t = 0; t < shape.num_chunks; ++t) {
    std::vector<char> active(C);
    for (std::size_t c = 0; c < C; ++c) active[c] = stream_is_active(rec.activity(t, c), tau);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t c) { return active[c] != 0; });
    std::size_t count = 0;
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t src = order[c];
      count += active[src] != 0;
      std::copy_n(rec.activities_.begin() + (t * C + src) * N, N,
                  out.activities_.begin() + (t * C + c) * N);
      std::copy_n(rec.embeddings_.begin() + (t * C + src) * D, D,
                  out.embeddings_.begin() + (t * C + c) * D);
      out.stream_order_[t * C + c] = rec.stream_order_[t * C + src];
    }
    out.active_counts_[t] = count;
  }
  out.canonical_ = true;
  return out;
}

}  // namespace msvbx
