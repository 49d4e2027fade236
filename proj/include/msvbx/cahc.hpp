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
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "msvbx/core.hpp"
#include "msvbx/state_space.hpp"

namespace msvbx {

/// One group of flat embedding indices per chunk; members must end up in
/// different clusters.
struct CannotLinkSet {
  std::vector<std::vector<std::size_t>> groups;
};

/// Labels are numbered 0..num_clusters-1 in order of first appearance.
struct ClusterAssignment {
  std::vector<int> labels;
  std::size_t num_clusters = 0;
};

struct AhcOptions {
  double threshold = 0.8;
  /// Merging stops once this many clusters remain, regardless of threshold.
  std::size_t min_clusters = 1;
};

/// One merge, identified by the smallest member index of each cluster.
struct AhcMerge {
  std::size_t first;
  std::size_t second;
  double distance;
};

/// Average-linkage AHC on Euclidean distances between rows of `points`.
/// Pairs whose clusters share a cannot-link group are never merged; among
/// mergeable pairs the closest is merged while its distance is <= threshold.
/// Ties go to the lexicographically smallest (first, second) pair.
ClusterAssignment constrained_ahc(const Eigen::MatrixXd& points, const CannotLinkSet& constraints,
                                  const AhcOptions& options,
                                  std::vector<AhcMerge>* merges = nullptr);

/// Flat index layout over the active streams of a canonical recording,
/// chunk-major: flat index k belongs to (chunk[k], stream[k]).
struct ActiveStreamIndex {
  std::vector<std::size_t> chunk;
  std::vector<std::size_t> stream;
  CannotLinkSet cannot_links;
};

ActiveStreamIndex index_active_streams(const ChunkedRecording& canonical);

inline constexpr double kDefaultInitSmoothing = 0.1;

/// Initial T x S occupancy: each active chunk puts 1 - smoothing on the state
/// matching its cluster labels and spreads the rest over the other states of
/// the same size. Rows of chunks without active streams are zero.
Eigen::MatrixXd init_occupancy(const ClusterAssignment& assignment,
                               const ChunkedRecording& canonical, const StateSpace& space,
                               double smoothing = kDefaultInitSmoothing);

}  // namespace msvbx
