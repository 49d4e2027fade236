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

#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

#include <fmt/format.h>

#include "msvbx/error.hpp"
#include "msvbx/stitch.hpp"

namespace msvbx {

std::string format_rttm(const DiarizationResult& result) {
  std::string out;
  for (const Segment& seg : result.segments()) {
    out += fmt::format("SPEAKER {} 1 {:.3f} {:.3f} <NA> <NA> {} <NA> <NA>\n", result.recording_id,
                       seg.onset, seg.duration, seg.speaker);
  }
  return out;
}

void write_rttm(const DiarizationResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << format_rttm(result);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::map<std::string, std::vector<Segment>> read_rttm(std::istream& in) {
  std::map<std::string, std::vector<Segment>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string type;
    if (!(fields >> type) || type.front() == '#') continue;
    if (type != "SPEAKER") continue;
    std::string rec, channel, ortho, stype, speaker;
    Segment seg;
    if (!(fields >> rec >> channel >> seg.onset >> seg.duration >> ortho >> stype >> speaker)) {
      throw Error(ErrorCode::kInvalidArgument, "malformed RTTM line " + std::to_string(line_no));
    }
    seg.speaker = speaker;
    out[rec].push_back(std::move(seg));
  }
  return out;
}

std::map<std::string, std::vector<Segment>> read_rttm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_rttm(in);
}

}  // namespace msvbx
