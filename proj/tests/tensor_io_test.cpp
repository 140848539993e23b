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

#include "nncabac/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include <unistd.h>

#include "gtest/gtest.h"
#include "nncabac/synthetic.hpp"

namespace nncabac {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("nncabac_tensor_io_" + std::to_string(::getpid()) + "_" + name);
}

TEST(TensorIo, LoadSmallTensor) {
  TensorFile f;
  f.entries.push_back({"w", TensorRole::kWeight, Tensor{{2, 2}, {1, 2, 3, 4}}});
  const auto path = temp_path("small.dcnw");
  save(path, f);
  const auto loaded = load(path);
  ASSERT_EQ(loaded.entries.size(), 1u);
  EXPECT_EQ(loaded.entries[0].name, "w");
  EXPECT_EQ(loaded.entries[0].tensor.dims, (Shape{2, 2}));
  EXPECT_EQ(loaded.entries[0].tensor.values, (std::vector<float>{1, 2, 3, 4}));
  fs::remove(path);
}

TEST(TensorIo, BitExactRoundTripOfAllFiniteKinds) {
  std::mt19937 rng(3);
  Tensor t{{64, 64}, {}};
  t.values.resize(4096);
  for (auto& v : t.values) {
    std::uint32_t bits;
    do {
      bits = rng();
    } while (!std::isfinite(std::bit_cast<float>(bits)));
    v = std::bit_cast<float>(bits);
  }
  t.values[0] = -0.0f;
  t.values[1] = std::numeric_limits<float>::denorm_min();
  t.values[2] = std::numeric_limits<float>::max();
  TensorFile f;
  f.entries.push_back({"w", TensorRole::kWeight, t});
  f.entries.push_back({"b", TensorRole::kExcluded, Tensor{{}, {7.0f}}});
  const auto back = from_bytes(to_bytes(f));
  ASSERT_EQ(back.entries.size(), 2u);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    ASSERT_EQ(std::bit_cast<std::uint32_t>(back.entries[0].tensor.values[i]), std::bit_cast<std::uint32_t>(t.values[i]));
  }
  EXPECT_EQ(back.entries[1], f.entries[1]);
}

TEST(TensorIo, DuplicateNamesRejected) {
  TensorFile f;
  f.entries.push_back({"w", TensorRole::kWeight, Tensor{{1, 1}, {1}}});
  f.entries.push_back({"w", TensorRole::kWeight, Tensor{{1, 1}, {2}}});
  try {
    (void)from_bytes(to_bytes(f));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kDuplicateName);
  }
  // A sigma entry shares its weight's name.
  f.entries[1].role = TensorRole::kSigma;
  EXPECT_NO_THROW((void)from_bytes(to_bytes(f)));
}

TEST(TensorIo, EmptyFileIsBadMagic) {
  const auto path = temp_path("empty.dcnw");
  write_file(path, std::vector<std::uint8_t>{});
  try {
    (void)load(path);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kBadMagic);
    EXPECT_NE(std::string(e.what()).find("bad magic"), std::string::npos);
  }
  fs::remove(path);
}

TEST(TensorIo, MissingFile) { EXPECT_THROW((void)load(temp_path("does_not_exist.dcnw")), InputError); }

TEST(TensorIo, NonFiniteRejected) {
  for (float bad : {std::numeric_limits<float>::quiet_NaN(), std::numeric_limits<float>::infinity()}) {
    TensorFile f;
    f.entries.push_back({"w", TensorRole::kWeight, Tensor{{1, 2}, {0.5f, bad}}});
    try {
      (void)from_bytes(to_bytes(f));
      FAIL();
    } catch (const FormatError& e) {
      EXPECT_EQ(e.kind(), FormatErrorKind::kNonFinite);
    }
  }
}

TEST(TensorIo, LowRankMustBeExcluded) {
  TensorFile f;
  f.entries.push_back({"bias", TensorRole::kWeight, Tensor{{3}, {1, 2, 3}}});
  EXPECT_THROW((void)to_bytes(f), InputError);
  auto bytes = to_bytes(TensorFile{{{"bias", TensorRole::kExcluded, Tensor{{3}, {1, 2, 3}}}}});
  bytes[4 + 2 + 4 + 2 + 4] = 0;  // flip role to weight
  try {
    (void)from_bytes(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kInvalidHeader);
  }
}

TEST(TensorIo, TruncatedData) {
  auto bytes = to_bytes(synthetic::toy_model());
  bytes.resize(bytes.size() - 3);
  try {
    (void)from_bytes(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kTruncated);
  }
}

TEST(SelectCodable, DropsExcludedAndMatrixifies) {
  TensorFile f;
  f.entries.push_back({"conv.w", TensorRole::kWeight, Tensor{{2, 1, 2, 2}, std::vector<float>(8, 0.5f)}});
  f.entries.push_back({"conv.bias", TensorRole::kExcluded, Tensor{{2}, {0, 0}}});
  const auto layers = select_codable(f);
  ASSERT_EQ(layers.size(), 1u);
  EXPECT_EQ(layers[0].weights.name, "conv.w");
  EXPECT_EQ(layers[0].weights.rows, 2u);
  EXPECT_EQ(layers[0].weights.cols, 4u);
  EXPECT_TRUE(layers[0].sigmas.empty());
}

TEST(SelectCodable, NameOrderAndSigmaPairing) {
  const auto layers = select_codable(synthetic::toy_model());
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_EQ(layers[0].weights.name, "conv1.weight");
  EXPECT_EQ(layers[0].sigmas.size(), layers[0].weights.size());
  EXPECT_EQ(layers[1].weights.name, "fc1.weight");
  EXPECT_TRUE(layers[1].sigmas.empty());
}

TEST(SelectCodable, SigmaShapeMismatch) {
  TensorFile f;
  f.entries.push_back({"w", TensorRole::kWeight, Tensor{{2, 3}, std::vector<float>(6, 1)}});
  f.entries.push_back({"w", TensorRole::kSigma, Tensor{{3, 2}, std::vector<float>(6, 1)}});
  try {
    (void)select_codable(f);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'w'"), std::string::npos);
  }
}

TEST(SelectCodable, EmptyFile) { EXPECT_TRUE(select_codable(TensorFile{}).empty()); }

}  // namespace
}  // namespace nncabac
