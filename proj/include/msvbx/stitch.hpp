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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "msvbx/core.hpp"

namespace msvbx {

/// One RTTM speaker turn.
struct Segment {
  std::string speaker;
  double onset = 0.0;
  double duration = 0.0;

  bool operator==(const Segment&) const = default;
};

/// Recording-level diarization: one binary track per speaker over the full
/// timeline of num_chunks * frames_per_chunk frames.
struct DiarizationResult {
  std::string recording_id;
  double frame_step = 0.0;
  std::vector<std::string> speakers;
  std::vector<std::vector<std::uint8_t>> tracks;

  /// Maximal runs of active frames, sorted by speaker order then onset.
  std::vector<Segment> segments() const;
};

inline constexpr double kDefaultActivityThreshold = 0.5;

/// Places each labeled stream's binarized activity on the global timeline of
/// its speaker. labels is T x C over the recording's stream positions, -1 for
/// unlabeled streams. Speakers are named spk0, spk1, ... by first active frame.
DiarizationResult stitch(const ChunkedRecording& recording, std::span<const int> labels,
                         double activity_threshold = kDefaultActivityThreshold);

/// Sliding binary median; the window is round(window_seconds / frame_step)
/// frames, bumped to the next odd length, shrunk symmetrically at the edges.
std::vector<std::uint8_t> median_filter(std::span<const std::uint8_t> track, double window_seconds,
                                        double frame_step);

void median_filter(DiarizationResult& result, double window_seconds);

std::string format_rttm(const DiarizationResult& result);
void write_rttm(const DiarizationResult& result, const std::filesystem::path& path);

/// Segments grouped by recording id.
std::map<std::string, std::vector<Segment>> read_rttm(std::istream& in);
std::map<std::string, std::vector<Segment>> read_rttm(const std::filesystem::path& path);

}  // namespace msvbx
