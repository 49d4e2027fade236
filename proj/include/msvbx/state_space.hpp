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
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace msvbx {

/// One (state, stream) slot of the HMM.
struct SubState {
  std::size_t state;
  std::size_t stream;
};

/// HMM states as ordered tuples of distinct speakers, lengths 1..max_streams.
/// State order: by tuple length, then lexicographic on speaker indices.
class StateSpace {
 public:
  /// Throws Error(kInvalidArgument) when num_speakers or max_streams is zero.
  StateSpace(std::size_t num_speakers, std::size_t max_streams);

  std::size_t num_speakers() const noexcept { return num_speakers_; }
  std::size_t max_streams() const noexcept { return max_streams_; }
  std::size_t max_state_size() const noexcept { return max_state_size_; }
  std::size_t num_states() const noexcept { return offsets_.size() - 1; }

  std::span<const int> state(std::size_t s) const;
  std::size_t state_size(std::size_t s) const { return offsets_[s + 1] - offsets_[s]; }

  /// Spk(s, c): speaker on stream c of state s.
  int speaker(std::size_t s, std::size_t c) const { return speakers_[offsets_[s] + c]; }

  /// Tied set of speaker g: every (s, c) with speaker(s, c) == g.
  std::span<const SubState> tied_set(std::size_t g) const { return tied_sets_.at(g); }

  /// Indices of all states with exactly k speakers (empty for k = 0).
  std::span<const std::size_t> states_of_size(std::size_t k) const;

  std::optional<std::size_t> find(std::span<const int> tuple) const;

 private:
  std::size_t num_speakers_;
  std::size_t max_streams_;
  std::size_t max_state_size_;
  std::vector<int> speakers_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<SubState>> tied_sets_;
  std::vector<std::vector<std::size_t>> by_size_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

inline StateSpace build_state_space(std::size_t num_speakers, std::size_t max_streams) {
  return StateSpace(num_speakers, max_streams);
}

}  // namespace msvbx
