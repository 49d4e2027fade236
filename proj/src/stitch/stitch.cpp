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

#include "msvbx/error.hpp"
#include "msvbx/stitch.hpp"

namespace msvbx {

std::vector<Segment> DiarizationResult::segments() const {
  std::vector<Segment> out;
  for (std::size_t k = 0; k < tracks.size(); ++k) {
    const auto& track = tracks[k];
    std::size_t i = 0;
    while (i < track.size()) {
      if (track[i] == 0) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < track.size() && track[j] != 0) ++j;
      out.push_back({speakers[k], static_cast<double>(i) * frame_step,
                     static_cast<double>(j - i) * frame_step});
      i = j;
    }
  }
  return out;
}

DiarizationResult stitch(const ChunkedRecording& recording, std::span<const int> labels,
                         double activity_threshold) {
  const std::size_t T = recording.num_chunks();
  const std::size_t C = recording.num_streams();
  const std::size_t N = recording.frames_per_chunk();
  if (labels.size() != T * C) {
    throw Error(ErrorCode::kDimensionMismatch, "labels must cover T x C stream positions");
  }

  // Raw tracks keyed by label, in first-active-frame order.
  struct Pending {
    int label;
    std::size_t first_frame;
    std::size_t first_stream;
    std::vector<std::uint8_t> track;
  };
  std::vector<Pending> pending;
  const std::size_t total = T * N;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      const int label = labels[t * C + c];
      if (label < 0) continue;
      for (std::size_t c2 = c + 1; c2 < C; ++c2) {
        if (labels[t * C + c2] == label) {
          throw Error(ErrorCode::kConstraintViolation,
                      "chunk " + std::to_string(t) + " assigns speaker " + std::to_string(label) +
                          " to two streams");
        }
      }
      auto it = std::find_if(pending.begin(), pending.end(),
                             [&](const Pending& p) { return p.label == label; });
      const auto activity = recording.activity(t, c);
      for (std::size_t n = 0; n < N; ++n) {
        if (activity[n] < activity_threshold) continue;
        if (it == pending.end()) {
          pending.push_back({label, t * N + n, c, std::vector<std::uint8_t>(total, 0)});
          it = pending.end() - 1;
        }
        it->track[t * N + n] = 1;
      }
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.first_frame != b.first_frame ? a.first_frame < b.first_frame
                                          : a.first_stream < b.first_stream;
  });

  DiarizationResult result;
  result.recording_id = recording.id();
  result.frame_step = recording.frame_step();
  for (std::size_t k = 0; k < pending.size(); ++k) {
    result.speakers.push_back("spk" + std::to_string(k));
    result.tracks.push_back(std::move(pending[k].track));
  }
  return result;
}

std::vector<std::uint8_t> median_filter(std::span<const std::uint8_t> track, double window_seconds,
                                        double frame_step) {
  if (!(frame_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "frame_step must be positive");
  auto window = static_cast<std::size_t>(std::max(1.0, std::round(window_seconds / frame_step)));
  if (window % 2 == 0) ++window;
  const std::size_t half = window / 2;
  const std::size_t n = track.size();

  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (track[i] != 0);
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    const std::size_t ones = prefix[i + h + 1] - prefix[i - h];
    out[i] = 2 * ones > 2 * h + 1 ? 1 : 0;
  }
  return out;
}

void median_filter(DiarizationResult& result, double window_seconds) {
  for (auto& track : result.tracks) track = median_filter(track, window_seconds, result.frame_step);
}

}  // namespace msvbx
