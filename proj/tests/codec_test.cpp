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

#include "nncabac/codec.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <unistd.h>

#include "gtest/gtest.h"
#include "nncabac/commands.hpp"
#include "nncabac/synthetic.hpp"

namespace nncabac {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nncabac_codec_" + std::to_string(::getpid()) + "_" + name);
  fs::create_directories(p);
  return p;
}

TEST(Codec, DecodedIndicesMatchEncoder) {
  const auto layers = select_codable(synthetic::toy_model());
  EncoderOptions opt;
  for (double lambda : {0.0, 0.01, 1.0}) {
    opt.rd.lambda = lambda;
    const auto results = encode_layers(layers, opt);
    const auto model = parse(serialize(assemble(results)));
    ASSERT_EQ(model.layers.size(), results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
      EXPECT_EQ(decode_indices(model.layers[i]).indices, results[i].indices.indices);
      const auto w = decode_layer(model.layers[i]);
      ASSERT_EQ(w.values.size(), results[i].indices.size());
      for (std::size_t j = 0; j < w.values.size(); ++j) {
        EXPECT_FLOAT_EQ(w.values[j], static_cast<float>(results[i].grid.delta * results[i].indices.indices[j]));
      }
    }
  }
}

TEST(Codec, ThreadCountDoesNotChangeBytes) {
  const auto file = synthetic::lenet300_100(1, 0.9, 0.05);
  EncoderOptions opt;
  opt.threads = 1;
  const auto one = encode_model(file, opt).bitstream;
  opt.threads = 8;
  EXPECT_EQ(encode_model(file, opt).bitstream, one);
}

TEST(Codec, SigmaMinSetsGridAtZeroS) {
  const auto file = synthetic::toy_model();
  const auto layers = select_codable(file);
  EncoderOptions opt;
  opt.s = 0;
  const auto r = encode_layer(layers[0], opt);
  const float smin = *std::min_element(layers[0].sigmas.begin(), layers[0].sigmas.end());
  EXPECT_NEAR(r.grid.delta, smin, 1e-12 * smin);
  EXPECT_EQ(r.coded.header.s, 0u);
}

TEST(Codec, GridFloorAndDefault) {
  const auto layers = select_codable(synthetic::toy_model());
  const auto& fc = layers[1];
  ASSERT_TRUE(fc.sigmas.empty());
  double w_max = 0;
  for (float v : fc.weights.values) w_max = std::max(w_max, std::fabs(double{v}));
  EXPECT_DOUBLE_EQ(layer_stats(fc, std::nullopt).sigma_min, w_max / 1024.0);
  EXPECT_DOUBLE_EQ(layer_stats(fc, 0.02).sigma_min, 0.02);
  EXPECT_THROW(layer_stats(fc, 0.0), InputError);
  CodableLayer zero{matrixify("z", Tensor{{2, 2}, {0, 0, 0, 0}}), {}};
  EXPECT_DOUBLE_EQ(layer_stats(zero, std::nullopt).sigma_min, 1.0);
}

TEST(Codec, UniformEtaIgnoresSigma) {
  const auto layers = select_codable(synthetic::toy_model());
  EncoderOptions opt;
  opt.uniform_eta = true;
  opt.rd.lambda = 0.0;
  const auto r = encode_layer(layers[0], opt);
  // With lambda = 0 the indices are nearest-grid regardless of eta.
  for (std::size_t i = 0; i < r.indices.size(); ++i) {
    EXPECT_LE(std::fabs(layers[0].weights.values[i] - r.grid.delta * r.indices.indices[i]), 0.5 * r.grid.delta + 1e-9);
  }
  EXPECT_NEAR(r.distortion, weighted_distortion(layers[0].weights.values, r.indices, r.grid), 1e-12);
}

TEST(Codec, EmptyModel) {
  const auto s = encode_model(TensorFile{}, EncoderOptions{});
  EXPECT_EQ(s.bitstream.size(), 10u);
  EXPECT_TRUE(decode_model(s.bitstream).entries.empty());
}

TEST(Codec, DecodeRestoresShapes) {
  const auto file = synthetic::toy_model();
  const auto restored = decode_model(encode_model(file, EncoderOptions{}).bitstream);
  ASSERT_EQ(restored.entries.size(), 2u);
  EXPECT_EQ(restored.entries[0].name, "conv1.weight");
  EXPECT_EQ(restored.entries[0].tensor.dims, (Shape{8, 3, 3, 3}));
  EXPECT_EQ(restored.entries[1].tensor.dims, (Shape{16, 72}));
}

TEST(Codec, CorruptPayloadIsReportedWithLayerName) {
  auto model = parse(encode_model(synthetic::toy_model(), EncoderOptions{}).bitstream);
  model.layers[1].payload.resize(1);
  try {
    (void)decode_indices(model.layers[1]);
    FAIL();
  } catch (const CodingError& e) {
    EXPECT_NE(std::string(e.what()).find("fc1.weight"), std::string::npos);
  }
}

TEST(Codec, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(16, 4, [](std::size_t i) {
      if (i == 3 || i == 11) throw InputError("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "fail 3");
  }
}

TEST(Sweep, FullRangePicksMinimum) {
  const auto file = synthetic::toy_model();
  EncoderOptions opt;
  opt.threads = 4;
  const auto r = sweep_model(file, opt, 0, 256);
  ASSERT_EQ(r.rows.size(), 257u);
  std::set<std::uint64_t> sizes;
  std::uint64_t min_size = UINT64_MAX;
  int min_s = -1;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].s, static_cast<int>(i));
    sizes.insert(r.rows[i].compressed_bytes);
    if (r.rows[i].compressed_bytes < min_size) {
      min_size = r.rows[i].compressed_bytes;
      min_s = r.rows[i].s;
    }
  }
  EXPECT_GT(sizes.size(), 1u);
  EXPECT_EQ(r.best_s, min_s);
  EXPECT_EQ(r.best_bitstream.size(), min_size);
  EncoderOptions single = opt;
  single.s = min_s;
  EXPECT_EQ(encode_model(file, single).bitstream, r.best_bitstream);
}

TEST(Sweep, RejectsEmptyRange) {
  EXPECT_THROW(sweep_model(synthetic::toy_model(), EncoderOptions{}, 5, 4), InputError);
  EXPECT_THROW(sweep_model(synthetic::toy_model(), EncoderOptions{}, -1, 4), InputError);
}

TEST(Sweep, WritesTableAndBest) {
  const auto dir = temp_dir("sweep");
  save(dir / "toy.dcnw", synthetic::toy_model());
  std::ostringstream report;
  const auto r = cmd_sweep(dir / "toy.dcnw", dir / "out", EncoderOptions{}, 10, 20, report);
  EXPECT_TRUE(fs::exists(dir / "out" / "sweep.tsv"));
  EXPECT_EQ(read_file(dir / "out" / "best.dcnb"), r.best_bitstream);
  EXPECT_NE(report.str().find("record=best s=" + std::to_string(r.best_s)), std::string::npos);
  fs::remove_all(dir);
}

TEST(Commands, InspectListsLayers) {
  const auto dir = temp_dir("inspect");
  std::ostringstream sink;
  save(dir / "toy.dcnw", synthetic::toy_model());
  cmd_encode(dir / "toy.dcnw", dir / "toy.dcnb", EncoderOptions{}, sink);
  std::ostringstream out;
  cmd_inspect(dir / "toy.dcnb", out);
  const auto text = out.str();
  EXPECT_NE(text.find("version 1\n2 layers\n"), std::string::npos) << text;
  EXPECT_NE(text.find("name=conv1.weight shape=(8,3,3,3)"), std::string::npos) << text;
  write_file(dir / "empty.dcnb", serialize(ModelBitstream{}));
  std::ostringstream empty;
  cmd_inspect(dir / "empty.dcnb", empty);
  EXPECT_NE(empty.str().find("0 layers"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Commands, EncodeReportHasTotals) {
  std::ostringstream out;
  report_encode(encode_model(synthetic::toy_model(), EncoderOptions{}), out);
  const auto text = out.str();
  EXPECT_NE(text.find("record=layer name=conv1.weight"), std::string::npos);
  EXPECT_NE(text.find("record=total layers=2 weights=1368"), std::string::npos) << text;
}

}  // namespace
}  // namespace nncabac
