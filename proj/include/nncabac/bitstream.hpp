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

#ifndef NNCABAC_BITSTREAM_HPP_
#define NNCABAC_BITSTREAM_HPP_

// .dcnb container: everything needed to decode a compressed model.
//
//   magic        4 bytes  "DCNB"
//   version      u16      1
//   layer_count  u32
//   layer_count times:
//     name_len          u16, then name_len bytes of UTF-8
//     rank              u8   1..4
//     orig_shape        rank x u32
//     rows, cols        u32, u32   matrix form; rows * cols == prod(orig_shape)
//     delta             u64  IEEE-754 binary64 bit pattern
//     s                 u32
//     n_flags           u8
//     remainder_bits    u8   <= 30
//     adaptation_shift  u8   1..15
//     payload_len       u32, then payload_len bytes of arithmetic-coded data
//
// All integers little-endian. Contexts are reset at every layer, so each
// payload decodes on its own.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nncabac/binarizer.hpp"
#include "nncabac/byte_io.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/tensor.hpp"

namespace nncabac {

inline constexpr char kBitstreamMagic[4] = {'D', 'C', 'N', 'B'};
inline constexpr std::uint16_t kBitstreamVersion = 1;
inline constexpr std::size_t kMaxShapeRank = 4;
inline constexpr std::uint64_t kMaxLayerElements = std::uint64_t{1} << 31;

struct LayerHeader {
  std::string name;
  Shape orig_shape;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  double delta = 1.0;
  std::uint32_t s = 0;
  std::uint8_t n_flags = 4;
  std::uint8_t remainder_bits = 0;
  std::uint8_t adaptation_shift = 4;

  BinarizationParams binarization() const { return {n_flags, remainder_bits}; }

  friend bool operator==(const LayerHeader& a, const LayerHeader& b) {
    return a.name == b.name && a.orig_shape == b.orig_shape && a.rows == b.rows &&
           a.cols == b.cols && std::bit_cast<std::uint64_t>(a.delta) == std::bit_cast<std::uint64_t>(b.delta) &&
           a.s == b.s && a.n_flags == b.n_flags && a.remainder_bits == b.remainder_bits &&
           a.adaptation_shift == b.adaptation_shift;
  }
};

struct CodedLayer {
  LayerHeader header;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const CodedLayer&, const CodedLayer&) = default;
};

struct ModelBitstream {
  std::uint16_t version = kBitstreamVersion;
  std::vector<CodedLayer> layers;

  friend bool operator==(const ModelBitstream&, const ModelBitstream&) = default;
};

namespace detail {

// Checks shared by serialize and parse. Returns an empty string when valid.
inline std::string header_problem(const LayerHeader& h) {
  if (h.orig_shape.empty() || h.orig_shape.size() > kMaxShapeRank) {
    return "rank " + std::to_string(h.orig_shape.size()) + " outside 1..4";
  }
  const std::uint64_t count = element_count(h.orig_shape);
  if (std::uint64_t{h.rows} * h.cols != count) {
    return "rows*cols " + std::to_string(std::uint64_t{h.rows} * h.cols) +
           " != shape element count " + std::to_string(count);
  }
  if (count > kMaxLayerElements) return "layer has more than 2^31 elements";
  if (!(h.delta > 0.0) || !std::isfinite(h.delta)) return "delta must be finite and > 0";
  if (h.remainder_bits > kMaxRemainderBits) {
    return "remainder_bits " + std::to_string(h.remainder_bits) + " > " +
           std::to_string(kMaxRemainderBits);
  }
  if (h.adaptation_shift < 1 || h.adaptation_shift > 15) {
    return "adaptation_shift " + std::to_string(h.adaptation_shift) + " outside 1..15";
  }
  return {};
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const ModelBitstream& model) {
  if (model.layers.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("too many layers for the container: " + std::to_string(model.layers.size()));
  }
  ByteWriter w;
  w.raw(std::string_view(kBitstreamMagic, 4));
  w.u16(model.version);
  w.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& layer : model.layers) {
    const auto& h = layer.header;
    if (h.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InputError("layer name longer than 65535 bytes: '" + h.name.substr(0, 32) + "...'");
    }
    if (auto problem = detail::header_problem(h); !problem.empty()) {
      throw InputError("layer '" + h.name + "': " + problem);
    }
    if (layer.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw InputError("layer '" + h.name + "': payload exceeds 4 GiB");
    }
    w.u16(static_cast<std::uint16_t>(h.name.size()));
    w.raw(h.name);
    w.u8(static_cast<std::uint8_t>(h.orig_shape.size()));
    for (auto d : h.orig_shape) w.u32(d);
    w.u32(h.rows);
    w.u32(h.cols);
    w.f64(h.delta);
    w.u32(h.s);
    w.u8(h.n_flags);
    w.u8(h.remainder_bits);
    w.u8(h.adaptation_shift);
    w.u32(static_cast<std::uint32_t>(layer.payload.size()));
    w.raw(layer.payload);
  }
  return w.take();
}

inline ModelBitstream parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.set_context("file header");
  if (bytes.size() < 4 || std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) !=
                              std::string_view(kBitstreamMagic, 4)) {
    throw FormatError(FormatErrorKind::kBadMagic, 0, "expected \"DCNB\"");
  }
  r.bytes(4);
  ModelBitstream model;
  model.version = r.u16();
  if (model.version != kBitstreamVersion) {
    throw FormatError(FormatErrorKind::kVersionMismatch, 4,
                      "got " + std::to_string(model.version) + ", expected " +
                          std::to_string(kBitstreamVersion));
  }
  const std::uint32_t count = r.u32();
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t start = r.offset();
    r.set_context("header of layer #" + std::to_string(i));
    CodedLayer layer;
    auto& h = layer.header;
    h.name = r.str(r.u16());
    r.set_context("header of layer '" + h.name + "'");
    const std::uint8_t rank = r.u8();
    if (rank == 0 || rank > kMaxShapeRank) {
      throw FormatError(FormatErrorKind::kInvalidHeader, r.offset() - 1,
                        "layer '" + h.name + "': rank " + std::to_string(rank) + " outside 1..4");
    }
    h.orig_shape.resize(rank);
    for (auto& d : h.orig_shape) d = r.u32();
    h.rows = r.u32();
    h.cols = r.u32();
    h.delta = r.f64();
    h.s = r.u32();
    h.n_flags = r.u8();
    h.remainder_bits = r.u8();
    h.adaptation_shift = r.u8();
    if (auto problem = detail::header_problem(h); !problem.empty()) {
      throw FormatError(FormatErrorKind::kInvalidHeader, start, "layer '" + h.name + "': " + problem);
    }
    if (!seen.insert(h.name).second) {
      throw FormatError(FormatErrorKind::kDuplicateName, start, "layer '" + h.name + "'");
    }
    const std::uint32_t len = r.u32();
    r.set_context("payload of layer '" + h.name + "'");
    auto payload = r.bytes(len);
    layer.payload.assign(payload.begin(), payload.end());
    model.layers.push_back(std::move(layer));
  }
  if (!r.at_end()) {
    throw FormatError(FormatErrorKind::kPayloadLength, r.offset(),
                      std::to_string(r.remaining()) + " trailing bytes after the last layer");
  }
  return model;
}

}  // namespace nncabac

#endif  // NNCABAC_BITSTREAM_HPP_
