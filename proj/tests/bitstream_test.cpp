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

#include "nncabac/bitstream.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace nncabac {
namespace {

CodedLayer sample_layer(std::string name, std::size_t payload_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CodedLayer l;
  l.header.name = std::move(name);
  l.header.orig_shape = {8, 3, 2, 2};
  l.header.rows = 8;
  l.header.cols = 12;
  l.header.delta = 0.0123456789;
  l.header.s = 64;
  l.header.n_flags = 4;
  l.header.remainder_bits = 9;
  l.header.adaptation_shift = 4;
  l.payload.resize(payload_len);
  for (auto& b : l.payload) b = static_cast<std::uint8_t>(rng());
  return l;
}

ModelBitstream sample_model() {
  ModelBitstream m;
  m.layers.push_back(sample_layer("conv1.weight", 37, 1));
  auto fc = sample_layer("fc1.weight", 5, 2);
  fc.header.orig_shape = {16, 72};
  fc.header.rows = 16;
  fc.header.cols = 72;
  fc.header.delta = 1e-3;
  m.layers.push_back(fc);
  return m;
}

FormatErrorKind parse_error_kind(const std::vector<std::uint8_t>& bytes) {
  try {
    (void)parse(bytes);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "parse succeeded";
  return FormatErrorKind::kInvalidHeader;
}

TEST(Bitstream, EmptyModelIsTenBytes) {
  const auto bytes = serialize(ModelBitstream{});
  ASSERT_EQ(bytes.size(), 10u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "DCNB");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(parse(bytes).layers.size(), 0u);
}

TEST(Bitstream, RoundTripAndDeterminism) {
  const auto m = sample_model();
  const auto a = serialize(m);
  const auto b = serialize(m);
  EXPECT_EQ(a, b);
  const auto parsed = parse(a);
  EXPECT_EQ(parsed, m);
  EXPECT_EQ(serialize(parsed), a);
}

TEST(Bitstream, FieldLayoutIsLittleEndian) {
  ModelBitstream m;
  auto l = sample_layer("ab", 2, 3);
  l.header.orig_shape = {0x01020304, 1};
  l.header.rows = 0x01020304;
  l.header.cols = 1;
  l.header.delta = 1.0;
  m.layers.push_back(l);
  const auto bytes = serialize(m);
  // magic(4) version(2) count(4) name_len(2) name(2) rank(1) dims...
  EXPECT_EQ(bytes[6], 1);  // layer_count LSB
  EXPECT_EQ(bytes[10], 2);  // name_len LSB
  EXPECT_EQ(bytes[14], 2);  // rank
  EXPECT_EQ(bytes[15], 0x04);
  EXPECT_EQ(bytes[18], 0x01);
  // delta = 1.0 -> 0x3FF0000000000000 after dims(8) rows(4) cols(4)
  const std::size_t delta_at = 15 + 8 + 8;
  EXPECT_EQ(bytes[delta_at + 6], 0xF0);
  EXPECT_EQ(bytes[delta_at + 7], 0x3F);
  EXPECT_EQ(bytes.size(), delta_at + 8 + 4 + 3 + 4 + 2);
}

TEST(Bitstream, DeltaBitsPreserved) {
  ModelBitstream m;
  auto l = sample_layer("x", 1, 4);
  l.header.delta = std::nextafter(0.1, 1.0);
  m.layers.push_back(l);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(parse(serialize(m)).layers[0].header.delta),
            std::bit_cast<std::uint64_t>(l.header.delta));
}

TEST(Bitstream, BadMagic) {
  auto bytes = serialize(sample_model());
  bytes[0] = 'X';
  try {
    (void)parse(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kBadMagic);
    EXPECT_EQ(e.offset(), 0u);
    EXPECT_NE(std::string(e.what()).find("bad magic"), std::string::npos);
  }
  EXPECT_EQ(parse_error_kind({}), FormatErrorKind::kBadMagic);
}

TEST(Bitstream, VersionMismatch) {
  auto bytes = serialize(sample_model());
  bytes[4] = 2;
  EXPECT_EQ(parse_error_kind(bytes), FormatErrorKind::kVersionMismatch);
}

TEST(Bitstream, TruncatedPayloadNamesLayer) {
  auto bytes = serialize(sample_model());
  bytes.resize(bytes.size() - 2);
  try {
    (void)parse(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kTruncated);
    EXPECT_NE(std::string(e.what()).find("fc1.weight"), std::string::npos) << e.what();
  }
}

TEST(Bitstream, TrailingBytes) {
  auto bytes = serialize(sample_model());
  bytes.push_back(0);
  EXPECT_EQ(parse_error_kind(bytes), FormatErrorKind::kPayloadLength);
}

TEST(Bitstream, InconsistentHeader) {
  auto m = sample_model();
  auto bytes = serialize(m);
  // rows of the first layer: after magic, version, count, name_len, name, rank, 4 dims
  const std::size_t rows_at = 10 + 2 + m.layers[0].header.name.size() + 1 + 16;
  bytes[rows_at] = 9;
  EXPECT_EQ(parse_error_kind(bytes), FormatErrorKind::kInvalidHeader);
}

TEST(Bitstream, SerializeRejectsInvalid) {
  ModelBitstream m;
  m.layers.push_back(sample_layer(std::string(70000, 'a'), 1, 5));
  EXPECT_THROW(serialize(m), InputError);
  m.layers[0] = sample_layer("ok", 1, 5);
  m.layers[0].header.rows = 7;
  EXPECT_THROW(serialize(m), InputError);
  m.layers[0] = sample_layer("ok", 1, 5);
  m.layers[0].header.delta = 0.0;
  EXPECT_THROW(serialize(m), InputError);
}

TEST(Bitstream, DuplicateLayerNames) {
  ModelBitstream m;
  m.layers.push_back(sample_layer("same", 1, 6));
  m.layers.push_back(sample_layer("same", 1, 7));
  EXPECT_EQ(parse_error_kind(serialize(m)), FormatErrorKind::kDuplicateName);
}

// Random corruption must only ever produce FormatError.
TEST(Bitstream, FuzzedInputsNeverCrash) {
  const auto valid = serialize(sample_model());
  std::mt19937_64 rng(42);
  int rejected = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    auto bytes = valid;
    switch (trial % 4) {
      case 0:
        for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
        break;
      case 1:
        bytes.resize(rng() % bytes.size());
        break;
      case 2:
        bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(rng() % bytes.size()), static_cast<std::uint8_t>(rng()));
        break;
      default:
        bytes.resize(rng() % 64);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        if (bytes.size() >= 4 && rng() % 2) std::copy_n("DCNB", 4, bytes.begin());
    }
    try {
      (void)parse(bytes);
    } catch (const FormatError&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0);
}

}  // namespace
}  // namespace nncabac
