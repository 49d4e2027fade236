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

#include "msvbx/cahc.hpp"
#include "msvbx/error.hpp"
#include "msvbx/kernels.hpp"

namespace msvbx {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

class GroupMask {
 public:
  explicit GroupMask(std::size_t num_groups) : words_((num_groups + 63) / 64, 0) {}
  void set(std::size_t g) { words_[g / 64] |= std::uint64_t{1} << (g % 64); }
  bool intersects(const GroupMask& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & other.words_[i]) != 0) return true;
    }
    return false;
  }
  void merge(const GroupMask& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }

 private:
  std::vector<std::uint64_t> words_;
};

class Agglomerator {
 public:
  Agglomerator(const Eigen::MatrixXd& points, const CannotLinkSet& constraints)
      : n_(static_cast<std::size_t>(points.rows())),
        dist_(n_ * n_, 0.0),
        size_(n_, 1),
        active_(n_, 1),
        best_dist_(n_, kInf),
        best_j_(n_, kNone),
        parent_(n_) {
    for (std::size_t i = 0; i < n_; ++i) parent_[i] = i;
    // Row-major copy so each point is contiguous for the distance kernel.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = points;
    const auto d = static_cast<std::size_t>(points.cols());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dd = std::sqrt(
            kernels::active_table().squared_distance(rows.row(static_cast<Eigen::Index>(i)).data(),
                                                     rows.row(static_cast<Eigen::Index>(j)).data(), d));
        dist_[i * n_ + j] = dd;
        dist_[j * n_ + i] = dd;
      }
    }
    masks_.assign(n_, GroupMask(constraints.groups.size()));
    for (std::size_t g = 0; g < constraints.groups.size(); ++g) {
      for (std::size_t idx : constraints.groups[g]) {
        if (idx >= n_) throw Error(ErrorCode::kInvalidArgument, "cannot-link index out of range");
        masks_[idx].set(g);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) refresh_row(i);
  }

  bool mergeable(std::size_t i, std::size_t j) const { return !masks_[i].intersects(masks_[j]); }

  void refresh_row(std::size_t i) {
    best_dist_[i] = kInf;
    best_j_[i] = kNone;
    if (active_[i] == 0) return;
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (active_[j] == 0 || !mergeable(i, j)) continue;
      if (dist_[i * n_ + j] < best_dist_[i]) {
        best_dist_[i] = dist_[i * n_ + j];
        best_j_[i] = j;
      }
    }
  }

  // Lexicographic tie-break: smallest distance, then smallest i.
  std::size_t best_row() const {
    std::size_t row = kNone;
    for (std::size_t i = 0; i < n_; ++i) {
      if (best_j_[i] == kNone) continue;
      if (row == kNone || best_dist_[i] < best_dist_[row]) row = i;
    }
    return row;
  }

  void merge(std::size_t i, std::size_t j) {
    const double wi = static_cast<double>(size_[i]);
    const double wj = static_cast<double>(size_[j]);
    for (std::size_t k = 0; k < n_; ++k) {
      if (active_[k] == 0 || k == i || k == j) continue;
      const double d = (wi * dist_[i * n_ + k] + wj * dist_[j * n_ + k]) / (wi + wj);
      dist_[i * n_ + k] = d;
      dist_[k * n_ + i] = d;
    }
    size_[i] += size_[j];
    active_[j] = 0;
    parent_[j] = i;
    masks_[i].merge(masks_[j]);
    best_dist_[j] = kInf;
    best_j_[j] = kNone;

    refresh_row(i);
    for (std::size_t k = 0; k < i; ++k) {
      if (active_[k] == 0) continue;
      if (best_j_[k] == i || best_j_[k] == j) {
        refresh_row(k);
      } else if (mergeable(k, i)) {
        const double d = dist_[k * n_ + i];
        if (d < best_dist_[k] || (d == best_dist_[k] && i < best_j_[k])) {
          best_dist_[k] = d;
          best_j_[k] = i;
        }
      }
    }
    for (std::size_t k = i + 1; k < j; ++k) {
      if (active_[k] != 0 && best_j_[k] == j) refresh_row(k);
    }
  }

  std::size_t n_;
  std::vector<double> dist_;
  std::vector<std::size_t> size_;
  std::vector<char> active_;
  std::vector<GroupMask> masks_;
  std::vector<double> best_dist_;
  std::vector<std::size_t> best_j_;
  std::vector<std::size_t> parent_;

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
};

}  // namespace

ClusterAssignment constrained_ahc(const Eigen::MatrixXd& points, const CannotLinkSet& constraints,
                                  const AhcOptions& options, std::vector<AhcMerge>* merges) {
  if (!(options.threshold >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "AHC threshold must be non-negative");
  }
  const auto n = static_cast<std::size_t>(points.rows());
  ClusterAssignment out;
  if (n == 0) return out;

  Agglomerator agg(points, constraints);
  std::size_t clusters = n;
  while (clusters > std::max<std::size_t>(options.min_clusters, 1)) {
    const std::size_t i = agg.best_row();
    if (i == kNone) break;
    const std::size_t j = agg.best_j_[i];
    const double d = agg.best_dist_[i];
    if (d > options.threshold) break;
    if (merges != nullptr) merges->push_back({i, j, d});
    agg.merge(i, j);
    --clusters;
  }

  // Representatives are the smallest member index, so ascending order of
  // representatives is first-appearance order.
  out.labels.assign(n, -1);
  std::vector<int> label_of_rep(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = agg.find(i);
    if (label_of_rep[r] < 0) label_of_rep[r] = next++;
    out.labels[i] = label_of_rep[r];
  }
  out.num_clusters = static_cast<std::size_t>(next);
  return out;
}

ActiveStreamIndex index_active_streams(const ChunkedRecording& canonical) {
  ActiveStreamIndex index;
  for (std::size_t t = 0; t < canonical.num_chunks(); ++t) {
    const std::size_t k = canonical.active_count(t);
    if (k == 0) continue;
    std::vector<std::size_t> group;
    for (std::size_t c = 0; c < k; ++c) {
      group.push_back(index.chunk.size());
      index.chunk.push_back(t);
      index.stream.push_back(c);
    }
    index.cannot_links.groups.push_back(std::move(group));
  }
  return index;
}

Eigen::MatrixXd init_occupancy(const ClusterAssignment& assignment,
                               const ChunkedRecording& canonical, const StateSpace& space,
                               double smoothing) {
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "occupancy smoothing must lie in [0,1)");
  }
  const ActiveStreamIndex index = index_active_streams(canonical);
  if (assignment.labels.size() != index.chunk.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "assignment does not cover the active streams");
  }
  Eigen::MatrixXd gamma =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(canonical.num_chunks()),
                            static_cast<Eigen::Index>(space.num_states()));
  std::size_t flat = 0;
  std::vector<int> tuple;
  for (std::size_t t = 0; t < canonical.num_chunks(); ++t) {
    const std::size_t k = canonical.active_count(t);
    if (k == 0) continue;
    tuple.assign(assignment.labels.begin() + static_cast<std::ptrdiff_t>(flat),
                 assignment.labels.begin() + static_cast<std::ptrdiff_t>(flat + k));
    flat += k;
    const auto target = space.find(tuple);
    if (!target) {
      throw Error(ErrorCode::kInternal,
                  "chunk " + std::to_string(t) + " has no matching state (repeated speaker?)");
    }
    const auto peers = space.states_of_size(k);
    const auto row = static_cast<Eigen::Index>(t);
    if (peers.size() == 1) {
      gamma(row, static_cast<Eigen::Index>(*target)) = 1.0;
      continue;
    }
    const double spread = smoothing / static_cast<double>(peers.size() - 1);
    for (std::size_t s : peers) gamma(row, static_cast<Eigen::Index>(s)) = spread;
    gamma(row, static_cast<Eigen::Index>(*target)) = 1.0 - smoothing;
  }
  return gamma;
}

}  // namespace msvbx
