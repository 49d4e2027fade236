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
#include <cstdint>
#include <map>

#include "msvbx/assignment.hpp"
#include "msvbx/error.hpp"
#include "msvbx/scorer.hpp"

namespace msvbx {

namespace {

using Track = std::vector<std::uint8_t>;

std::int64_t to_frame(double seconds, double resolution) {
  return static_cast<std::int64_t>(std::llround(seconds / resolution));
}

std::vector<Track> rasterize(std::span<const Segment> segments, std::size_t frames,
                             double resolution, std::vector<std::string>& names) {
  std::map<std::string, std::size_t> index;
  std::vector<Track> tracks;
  for (const Segment& seg : segments) {
    auto [it, inserted] = index.emplace(seg.speaker, tracks.size());
    if (inserted) {
      names.push_back(seg.speaker);
      tracks.emplace_back(frames, 0);
    }
    const auto begin = std::clamp<std::int64_t>(to_frame(seg.onset, resolution), 0,
                                                static_cast<std::int64_t>(frames));
    const auto end = std::clamp<std::int64_t>(to_frame(seg.onset + seg.duration, resolution), 0,
                                              static_cast<std::int64_t>(frames));
    for (std::int64_t f = begin; f < end; ++f) tracks[it->second][static_cast<std::size_t>(f)] = 1;
  }
  return tracks;
}

}  // namespace

ScoreReport score_der(std::span<const Segment> reference, std::span<const Segment> hypothesis,
                      double collar, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  if (!(collar >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "collar must be non-negative");
  double end_time = 0.0;
  for (const auto* list : {&reference, &hypothesis}) {
    for (const Segment& seg : *list) {
      if (seg.duration < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative segment duration");
      end_time = std::max(end_time, seg.onset + seg.duration);
    }
  }
  const auto frames = static_cast<std::size_t>(to_frame(end_time, resolution) + 1);

  ScoreReport report;
  std::vector<std::string> ref_names, hyp_names;
  const std::vector<Track> ref = rasterize(reference, frames, resolution, ref_names);
  const std::vector<Track> hyp = rasterize(hypothesis, frames, resolution, hyp_names);
  report.ref_speakers = ref.size();
  report.hyp_speakers = hyp.size();

  Track scored(frames, 1);
  if (collar > 0.0) {
    for (const Segment& seg : reference) {
      for (double boundary : {seg.onset, seg.onset + seg.duration}) {
        const auto lo = std::clamp<std::int64_t>(to_frame(boundary - collar, resolution), 0,
                                                 static_cast<std::int64_t>(frames));
        const auto hi = std::clamp<std::int64_t>(to_frame(boundary + collar, resolution), 0,
                                                 static_cast<std::int64_t>(frames));
        for (std::int64_t f = lo; f < hi; ++f) scored[static_cast<std::size_t>(f)] = 0;
      }
    }
  }

  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ref.size()),
                                                  static_cast<Eigen::Index>(hyp.size()));
  for (std::size_t f = 0; f < frames; ++f) {
    if (scored[f] == 0) continue;
    for (std::size_t r = 0; r < ref.size(); ++r) {
      if (ref[r][f] == 0) continue;
      for (std::size_t h = 0; h < hyp.size(); ++h) {
        overlap(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(h)) += hyp[h][f];
      }
    }
  }
  const std::vector<int> mapping = max_weight_assignment(overlap);

  std::size_t speech = 0, miss = 0, fa = 0, conf = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (scored[f] == 0) continue;
    std::size_t n_ref = 0, n_hyp = 0, n_correct = 0;
    for (std::size_t r = 0; r < ref.size(); ++r) {
      if (ref[r][f] == 0) continue;
      ++n_ref;
      if (mapping[r] >= 0 && hyp[static_cast<std::size_t>(mapping[r])][f] != 0) ++n_correct;
    }
    for (const Track& h : hyp) n_hyp += h[f];
    speech += n_ref;
    miss += n_ref > n_hyp ? n_ref - n_hyp : 0;
    fa += n_hyp > n_ref ? n_hyp - n_ref : 0;
    conf += std::min(n_ref, n_hyp) - n_correct;
  }
  if (speech == 0) throw Error(ErrorCode::kUndefined, "reference has no scored speech");

  const double total = static_cast<double>(speech);
  report.scored_speech = total * resolution;
  report.missed_time = static_cast<double>(miss) * resolution;
  report.false_alarm_time = static_cast<double>(fa) * resolution;
  report.confusion_time = static_cast<double>(conf) * resolution;
  report.missed = 100.0 * static_cast<double>(miss) / total;
  report.false_alarm = 100.0 * static_cast<double>(fa) / total;
  report.confusion = 100.0 * static_cast<double>(conf) / total;
  report.der = 100.0 * static_cast<double>(miss + fa + conf) / total;
  return report;
}

double mean_error(std::span<const std::size_t> ref_counts, std::span<const std::size_t> hyp_counts) {
  if (ref_counts.size() != hyp_counts.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "count lists differ in length");
  }
  if (ref_counts.empty()) throw Error(ErrorCode::kUndefined, "mean error of zero recordings");
  double sum = 0.0;
  for (std::size_t r = 0; r < ref_counts.size(); ++r) {
    sum += std::abs(static_cast<double>(ref_counts[r]) - static_cast<double>(hyp_counts[r]));
  }
  return sum / static_cast<double>(ref_counts.size());
}

CorpusReport aggregate(std::vector<ScoreReport> recordings) {
  CorpusReport out;
  double speech = 0.0, miss = 0.0, fa = 0.0, conf = 0.0;
  std::vector<std::size_t> ref_counts, hyp_counts;
  for (const ScoreReport& r : recordings) {
    speech += r.scored_speech;
    miss += r.missed_time;
    fa += r.false_alarm_time;
    conf += r.confusion_time;
    ref_counts.push_back(r.ref_speakers);
    hyp_counts.push_back(r.hyp_speakers);
  }
  if (speech > 0.0) {
    out.missed = 100.0 * miss / speech;
    out.false_alarm = 100.0 * fa / speech;
    out.confusion = 100.0 * conf / speech;
    out.der = 100.0 * (miss + fa + conf) / speech;
  }
  if (!recordings.empty()) out.me = mean_error(ref_counts, hyp_counts);
  out.recordings = std::move(recordings);
  return out;
}

nlohmann::json to_json(const CorpusReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const ScoreReport& r : report.recordings) {
    per.push_back({{"recording", r.recording_id},
                   {"der", r.der},
                   {"miss", r.missed},
                   {"fa", r.false_alarm},
                   {"confusion", r.confusion},
                   {"scored_speech", r.scored_speech},
                   {"ref_speakers", r.ref_speakers},
                   {"hyp_speakers", r.hyp_speakers}});
  }
  return {{"der", report.der},
          {"miss", report.missed},
          {"fa", report.false_alarm},
          {"confusion", report.confusion},
          {"me", report.me},
          {"recordings", std::move(per)}};
}

}  // namespace msvbx
