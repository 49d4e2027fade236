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

#include <limits>

#include <json.hpp>

#include "msvbx/error.hpp"
#include "msvbx/log.hpp"
#include "msvbx/pipeline.hpp"

namespace msvbx {

Eigen::MatrixXd ahc_points(const StreamData& data) {
  std::size_t n = 0;
  for (std::size_t k : data.active_counts) n += k;
  Eigen::MatrixXd points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(data.dim));
  Eigen::Index row = 0;
  for (std::size_t t = 0; t < data.num_chunks; ++t) {
    for (std::size_t c = 0; c < data.active_counts[t]; ++c, ++row) {
      const auto x = data.x.row(static_cast<Eigen::Index>(t * data.max_streams + c));
      const double norm = x.norm();
      points.row(row) = norm > 0.0 ? (x / norm).eval() : x.eval();
    }
  }
  return points;
}

ClusterOutcome cluster_recording(const ChunkedRecording& recording, const PldaBackend& backend,
                                 const PipelineConfig& cfg) {
  cfg.inference.validate();
  ClusterOutcome out;
  out.canonical = detect_active_streams(recording, cfg.inference.tau);
  const ChunkedRecording& rec = out.canonical;
  const StreamData data = make_stream_data(rec, backend);
  const std::size_t T = rec.num_chunks();
  const std::size_t C = rec.num_streams();

  const ActiveStreamIndex index = index_active_streams(rec);
  AhcOptions ahc;
  ahc.threshold = cfg.ahc_threshold;
  if (cfg.init_clusters) {
    ahc.threshold = std::numeric_limits<double>::infinity();
    ahc.min_clusters = *cfg.init_clusters;
  }
  out.init = constrained_ahc(ahc_points(data), index.cannot_links, ahc);
  log().info("{}: cAHC produced {} clusters over {} embeddings", rec.id(), out.init.num_clusters,
             index.chunk.size());

  out.labels.assign(T * C, -1);
  if (out.init.num_clusters > 0) {
    if (cfg.mode == ClusterMode::kVbx) {
      const StateSpace space(out.init.num_clusters, 1);
      const Eigen::MatrixXd gamma = init_occupancy(out.init, rec, space, cfg.init_smoothing);
      out.vb = run_vbx(data, out.init.num_clusters, gamma, cfg.inference);
    } else {
      const StateSpace space(out.init.num_clusters, std::max<std::size_t>(rec.max_active_count(), 1));
      const Eigen::MatrixXd gamma = init_occupancy(out.init, rec, space, cfg.init_smoothing);
      out.vb = run_msvbx(data, space, gamma, cfg.inference);
    }
    out.labels = out.vb.labels;
    out.speaker_count = out.vb.speaker_count;
  }

  out.source_labels.assign(T * C, -1);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      out.source_labels[t * C + rec.original_stream(t, c)] = out.labels[t * C + c];
    }
  }
  out.diarization = stitch(rec, out.labels, cfg.activity_threshold);
  if (cfg.median_window > 0.0) median_filter(out.diarization, cfg.median_window);
  return out;
}

std::string diagnostics_jsonl(const ClusterOutcome& outcome) {
  std::string out;
  const auto& id = outcome.canonical.id();
  const auto& iterations = outcome.vb.trace.iterations;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    out += nlohmann::json{{"recording", id},
                          {"iteration", i},
                          {"elbo", iterations[i].elbo},
                          {"retained_states", iterations[i].retained_states},
                          {"retained_speakers", iterations[i].retained_speakers}}
               .dump();
    out += '\n';
  }
  out += nlohmann::json{{"recording", id},
                        {"init_clusters", outcome.init.num_clusters},
                        {"iterations", iterations.size()},
                        {"converged", outcome.vb.trace.converged},
                        {"speaker_count", outcome.speaker_count},
                        {"rttm_speakers", outcome.diarization.speakers.size()}}
             .dump();
  out += '\n';
  return out;
}

}  // namespace msvbx
