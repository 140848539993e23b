// Copyright 2026 The nncabac Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NNCABAC_TENSOR_IO_HPP_
#define NNCABAC_TENSOR_IO_HPP_

// .dcnw container for uncompressed tensors.
//
//   magic        4 bytes  "DCNW"
//   version      u16      1
//   entry_count  u32
//   entry_count times:
//     name_len   u16, then name_len bytes of UTF-8
//     role       u8   0 = weight, 1 = sigma, 2 = excluded
//     rank       u8   0..8
//     dims       rank x u32
//     data       prod(dims) x f32 (IEEE-754 binary32), row-major
//
// All integers and floats little-endian. A sigma entry carries the per-weight
// standard deviations of the weight entry with the same name. Names are
// unique within a role. Weight and sigma entries must have rank >= 2; biases
// and normalization parameters are stored as excluded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nncabac/byte_io.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/tensor.hpp"

namespace nncabac {

inline constexpr char kTensorFileMagic[4] = {'D', 'C', 'N', 'W'};
inline constexpr std::uint16_t kTensorFileVersion = 1;
inline constexpr std::size_t kMaxTensorRank = 8;

enum class TensorRole : std::uint8_t { kWeight = 0, kSigma = 1, kExcluded = 2 };

struct TensorEntry {
  std::string name;
  TensorRole role = TensorRole::kWeight;
  Tensor tensor;

  friend bool operator==(const TensorEntry&, const TensorEntry&) = default;
};

struct TensorFile {
  std::vector<TensorEntry> entries;

  const TensorEntry* find(std::string_view name, TensorRole role) const {
    for (const auto& e : entries) {
      if (e.role == role && e.name == name) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const TensorFile&, const TensorFile&) = default;
};

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("error reading '" + path.string() + "'");
  return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

namespace detail {

inline std::string entry_problem(const TensorEntry& e) {
  if (e.tensor.dims.size() > kMaxTensorRank) return "rank above " + std::to_string(kMaxTensorRank);
  if (e.role != TensorRole::kExcluded && e.tensor.dims.size() < 2) {
    return "rank-" + std::to_string(e.tensor.dims.size()) +
           " tensors must be marked excluded, not coded";
  }
  if (element_count(e.tensor.dims) != e.tensor.values.size()) {
    return "shape " + shape_string(e.tensor.dims) + " does not match " +
           std::to_string(e.tensor.values.size()) + " values";
  }
  return {};
}

}  // namespace detail

inline std::vector<std::uint8_t> to_bytes(const TensorFile& file) {
  ByteWriter w;
  w.raw(std::string_view(kTensorFileMagic, 4));
  w.u16(kTensorFileVersion);
  w.u32(static_cast<std::uint32_t>(file.entries.size()));
  for (const auto& e : file.entries) {
    if (e.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InputError("tensor name longer than 65535 bytes");
    }
    if (auto problem = detail::entry_problem(e); !problem.empty()) {
      throw InputError("tensor '" + e.name + "': " + problem);
    }
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.raw(e.name);
    w.u8(static_cast<std::uint8_t>(e.role));
    w.u8(static_cast<std::uint8_t>(e.tensor.dims.size()));
    for (auto d : e.tensor.dims) w.u32(d);
    for (float v : e.tensor.values) w.f32(v);
  }
  return w.take();
}

inline TensorFile from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) !=
                              std::string_view(kTensorFileMagic, 4)) {
    throw FormatError(FormatErrorKind::kBadMagic, 0, "expected \"DCNW\"");
  }
  ByteReader r(bytes);
  r.set_context("file header");
  r.bytes(4);
  if (const auto version = r.u16(); version != kTensorFileVersion) {
    throw FormatError(FormatErrorKind::kVersionMismatch, 4, "got " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  TensorFile file;
  std::set<std::pair<TensorRole, std::string>> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t start = r.offset();
    r.set_context("entry #" + std::to_string(i));
    TensorEntry e;
    e.name = r.str(r.u16());
    r.set_context("entry '" + e.name + "'");
    const std::uint8_t role = r.u8();
    if (role > 2) {
      throw FormatError(FormatErrorKind::kInvalidHeader, r.offset() - 1,
                        "entry '" + e.name + "': unknown role " + std::to_string(role));
    }
    e.role = static_cast<TensorRole>(role);
    const std::uint8_t rank = r.u8();
    if (rank > kMaxTensorRank) {
      throw FormatError(FormatErrorKind::kInvalidHeader, r.offset() - 1,
                        "entry '" + e.name + "': rank " + std::to_string(rank));
    }
    e.tensor.dims.resize(rank);
    for (auto& d : e.tensor.dims) d = r.u32();
    const std::uint64_t n = element_count(e.tensor.dims);
    if (n > r.remaining() / 4) {
      throw FormatError(FormatErrorKind::kTruncated, r.offset(),
                        "entry '" + e.name + "' declares " + std::to_string(n) + " values, only " +
                            std::to_string(r.remaining()) + " bytes left");
    }
    e.tensor.values.resize(n);
    for (auto& v : e.tensor.values) {
      v = r.f32();
      if (!std::isfinite(v)) {
        throw FormatError(FormatErrorKind::kNonFinite, r.offset() - 4, "entry '" + e.name + "'");
      }
    }
    if (auto problem = detail::entry_problem(e); !problem.empty()) {
      throw FormatError(FormatErrorKind::kInvalidHeader, start, "entry '" + e.name + "': " + problem);
    }
    if (!seen.emplace(e.role, e.name).second) {
      throw FormatError(FormatErrorKind::kDuplicateName, start, "entry '" + e.name + "'");
    }
    file.entries.push_back(std::move(e));
  }
  if (!r.at_end()) {
    throw FormatError(FormatErrorKind::kPayloadLength, r.offset(),
                      std::to_string(r.remaining()) + " trailing bytes after the last entry");
  }
  return file;
}

inline TensorFile load(const std::filesystem::path& path) {
  try {
    return from_bytes(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.offset(), path.string());
  }
}

inline void save(const std::filesystem::path& path, const TensorFile& file) {
  write_file(path, to_bytes(file));
}

// A weight matrix ready for coding, plus its sigma map when one exists.
struct CodableLayer {
  WeightTensor weights;
  std::vector<float> sigmas;  // empty, or one per weight in matrix order
};

// Weight entries of rank 2 or 4 in name order, matrixified and paired with
// their sigma entries.
inline std::vector<CodableLayer> select_codable(const TensorFile& file) {
  std::vector<const TensorEntry*> weights;
  for (const auto& e : file.entries) {
    const auto rank = e.tensor.dims.size();
    if (e.role == TensorRole::kWeight && (rank == 2 || rank == 4)) weights.push_back(&e);
  }
  std::sort(weights.begin(), weights.end(),
            [](const TensorEntry* a, const TensorEntry* b) { return a->name < b->name; });

  std::vector<CodableLayer> out;
  out.reserve(weights.size());
  for (const auto* e : weights) {
    CodableLayer layer{matrixify(e->name, e->tensor), {}};
    if (const auto* s = file.find(e->name, TensorRole::kSigma)) {
      if (s->tensor.dims != e->tensor.dims) {
        throw InputError("layer '" + e->name + "': sigma shape " + shape_string(s->tensor.dims) +
                         " does not match weight shape " + shape_string(e->tensor.dims));
      }
      layer.sigmas = s->tensor.values;
    }
    out.push_back(std::move(layer));
  }
  return out;
}

}  // namespace nncabac

#endif  // NNCABAC_TENSOR_IO_HPP_
