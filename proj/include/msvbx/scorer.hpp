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
#include <string>
#include <vector>

#include <json.hpp>

#include "msvbx/stitch.hpp"

namespace msvbx {

inline constexpr double kScoringResolution = 0.01;

/// Error components are percentages of scored reference speech time.
struct ScoreReport {
  std::string recording_id;
  double der = 0.0;
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double scored_speech = 0.0;  // seconds
  double missed_time = 0.0;
  double false_alarm_time = 0.0;
  double confusion_time = 0.0;
  std::size_t ref_speakers = 0;
  std::size_t hyp_speakers = 0;
};

/// Frame-based DER: frames within +-collar of a reference boundary are not
/// scored; speakers are mapped one-to-one to maximize overlap.
/// Throws Error(kUndefined) when no reference speech is scored.
ScoreReport score_der(std::span<const Segment> reference, std::span<const Segment> hypothesis,
                      double collar, double resolution = kScoringResolution);

/// ME = mean |C_r - Ĉ_r|.
double mean_error(std::span<const std::size_t> ref_counts, std::span<const std::size_t> hyp_counts);

/// Corpus report: time-weighted DER over recordings plus ME.
struct CorpusReport {
  double der = 0.0;
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double me = 0.0;
  std::vector<ScoreReport> recordings;
};

CorpusReport aggregate(std::vector<ScoreReport> recordings);

nlohmann::json to_json(const CorpusReport& report);

}  // namespace msvbx
