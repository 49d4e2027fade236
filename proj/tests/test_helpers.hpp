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

#include <functional>
#include <string>
#include <vector>

#include "msvbx/core.hpp"

namespace msvbx::testing {

/// Builds a recording from per-(t, c, n) activity and per-(t, c, d) embedding
/// generators.
inline ChunkedRecording make_recording(
    std::size_t T, std::size_t C, std::size_t D, std::size_t N,
    const std::function<float(std::size_t, std::size_t, std::size_t)>& activity,
    const std::function<float(std::size_t, std::size_t, std::size_t)>& embedding,
    float frame_step = 0.1F, std::string id = "rec") {
  std::vector<float> act(T * C * N), emb(T * C * D);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t n = 0; n < N; ++n) act[(t * C + c) * N + n] = activity(t, c, n);
      for (std::size_t d = 0; d < D; ++d) emb[(t * C + c) * D + d] = embedding(t, c, d);
    }
  }
  return ChunkedRecording(std::move(id), RecordingShape{T, C, D, N}, frame_step, std::move(act),
                          std::move(emb));
}

/// Recording whose stream activities are constant per (t, c).
inline ChunkedRecording constant_activity_recording(const std::vector<std::vector<float>>& levels,
                                                    std::size_t D = 2, std::size_t N = 4) {
  const std::size_t T = levels.size();
  const std::size_t C = levels.front().size();
  return make_recording(
      T, C, D, N, [&](std::size_t t, std::size_t c, std::size_t) { return levels[t][c]; },
      [](std::size_t t, std::size_t c, std::size_t d) { return static_cast<float>(t * 100 + c * 10 + d); });
}

}  // namespace msvbx::testing
