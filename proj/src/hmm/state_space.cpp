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
#include <functional>

#include "msvbx/error.hpp"
#include "msvbx/log.hpp"
#include "msvbx/state_space.hpp"

namespace msvbx {

StateSpace::StateSpace(std::size_t num_speakers, std::size_t max_streams)
    : num_speakers_(num_speakers),
      max_streams_(max_streams),
      max_state_size_(std::min(num_speakers, max_streams)) {
  if (num_speakers == 0) throw Error(ErrorCode::kInvalidArgument, "state space needs a speaker");
  if (max_streams == 0) throw Error(ErrorCode::kInvalidArgument, "state space needs a stream");

  offsets_.push_back(0);
  by_size_.resize(max_state_size_ + 1);
  tied_sets_.resize(num_speakers_);

  std::vector<int> tuple;
  std::vector<char> used(num_speakers_, 0);
  // Depth-first enumeration of ordered tuples of fixed length k yields
  // lexicographic order directly.
  std::function<void(std::size_t)> extend = [&](std::size_t k) {
    if (tuple.size() == k) {
      const std::size_t s = offsets_.size() - 1;
      speakers_.insert(speakers_.end(), tuple.begin(), tuple.end());
      offsets_.push_back(speakers_.size());
      for (std::size_t c = 0; c < k; ++c) {
        tied_sets_[static_cast<std::size_t>(tuple[c])].push_back({s, c});
      }
      by_size_[k].push_back(s);
      lookup_.emplace(tuple, s);
      return;
    }
    for (std::size_t g = 0; g < num_speakers_; ++g) {
      if (used[g] != 0) continue;
      used[g] = 1;
      tuple.push_back(static_cast<int>(g));
      extend(k);
      tuple.pop_back();
      used[g] = 0;
    }
  };
  for (std::size_t k = 1; k <= max_state_size_; ++k) extend(k);

  if (num_states() > 100000) {
    log().warn("state space has {} states ({} speakers, {} streams)", num_states(), num_speakers,
               max_streams);
  }
}

std::span<const int> StateSpace::state(std::size_t s) const {
  return std::span<const int>(speakers_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

std::span<const std::size_t> StateSpace::states_of_size(std::size_t k) const {
  if (k == 0 || k >= by_size_.size()) return {};
  return by_size_[k];
}

std::optional<std::size_t> StateSpace::find(std::span<const int> tuple) const {
  const auto it = lookup_.find(std::vector<int>(tuple.begin(), tuple.end()));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

}  // namespace msvbx
