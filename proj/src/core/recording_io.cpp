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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "msvbx/core.hpp"
#include "msvbx/error.hpp"

namespace msvbx {

namespace {

constexpr std::size_t kMagicSize = sizeof(kMsvbMagic) - 1;
// Upper bound on the float count of one payload block (16 GiB of floats).
constexpr std::uint64_t kMaxFloats = std::uint64_t{1} << 32;

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFFU), static_cast<char>((v >> 8) & 0xFFU),
                                 static_cast<char>((v >> 16) & 0xFFU),
                                 static_cast<char>((v >> 24) & 0xFFU)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_floats(std::ostream& out, std::span<const float> values) {
  std::vector<char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int k = 0; k < 4; ++k) buf[i * 4 + k] = static_cast<char>((bits >> (8 * k)) & 0xFFU);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<float> get_floats(std::istream& in, std::uint64_t count, const char* what) {
  std::vector<unsigned char> buf(count * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != buf.size()) {
    throw Error(ErrorCode::kTruncated, std::string("payload ends inside ") + what);
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<float>(get_u32(&buf[i * 4]));
  return values;
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t ab = 0;
  std::uint64_t abc = 0;
  if (__builtin_mul_overflow(a, b, &ab) || __builtin_mul_overflow(ab, c, &abc) ||
      abc > kMaxFloats) {
    throw Error(ErrorCode::kDimensionOverflow, "declared dimensions exceed the format limit");
  }
  return abc;
}

}  // namespace

ChunkedRecording read_recording(std::istream& in, std::string id) {
  std::array<char, kMagicSize> magic{};
  in.read(magic.data(), kMagicSize);
  if (static_cast<std::size_t>(in.gcount()) != kMagicSize ||
      std::memcmp(magic.data(), kMsvbMagic, kMagicSize) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an MSVB1 recording");
  }
  std::array<unsigned char, 20> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (static_cast<std::size_t>(in.gcount()) != header.size()) {
    throw Error(ErrorCode::kTruncated, "header is incomplete");
  }
  RecordingShape shape;
  shape.num_chunks = get_u32(&header[0]);
  shape.num_streams = get_u32(&header[4]);
  shape.embed_dim = get_u32(&header[8]);
  shape.frames_per_chunk = get_u32(&header[12]);
  const float frame_step = std::bit_cast<float>(get_u32(&header[16]));

  const std::uint64_t n_act =
      checked_product(shape.num_chunks, shape.num_streams, shape.frames_per_chunk);
  const std::uint64_t n_emb = checked_product(shape.num_chunks, shape.num_streams, shape.embed_dim);

  // Reject payloads longer than the stream before allocating.
  if (in.good()) {
    const auto here = in.tellg();
    if (here != std::streampos(-1)) {
      in.seekg(0, std::ios::end);
      const auto end = in.tellg();
      in.seekg(here);
      if (end != std::streampos(-1) &&
          static_cast<std::uint64_t>(end - here) < (n_act + n_emb) * 4) {
        throw Error(ErrorCode::kTruncated, "file is shorter than the declared payload");
      }
    }
  }
  std::vector<float> activities = get_floats(in, n_act, "activities");
  std::vector<float> embeddings = get_floats(in, n_emb, "embeddings");
  return ChunkedRecording(std::move(id), shape, frame_step, std::move(activities),
                          std::move(embeddings));
}

ChunkedRecording read_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_recording(in, path.stem().string());
}

void write_recording(const ChunkedRecording& rec, std::ostream& out) {
  const RecordingShape& s = rec.shape();
  for (std::size_t v : {s.num_chunks, s.num_streams, s.embed_dim, s.frames_per_chunk}) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::kDimensionOverflow, "dimension does not fit in 32 bits");
    }
  }
  out.write(kMsvbMagic, kMagicSize);
  put_u32(out, static_cast<std::uint32_t>(s.num_chunks));
  put_u32(out, static_cast<std::uint32_t>(s.num_streams));
  put_u32(out, static_cast<std::uint32_t>(s.embed_dim));
  put_u32(out, static_cast<std::uint32_t>(s.frames_per_chunk));
  put_u32(out, std::bit_cast<std::uint32_t>(rec.frame_step()));
  put_floats(out, rec.activities());
  put_floats(out, rec.embeddings());
  if (!out) throw Error(ErrorCode::kIo, "write failed");
}

void write_recording(const ChunkedRecording& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_recording(rec, out);
}

}  // namespace msvbx
