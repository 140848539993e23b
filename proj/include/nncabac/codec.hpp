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

#ifndef NNCABAC_CODEC_HPP_
#define NNCABAC_CODEC_HPP_

// Layer pipeline: grid construction, RD quantization, entropy coding, and the
// inverse. Layers are independent, so a model is encoded layer-parallel and
// reassembled in input order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "nncabac/arith_coder.hpp"
#include "nncabac/binarizer.hpp"
#include "nncabac/bitstream.hpp"
#include "nncabac/context_model.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/metrics.hpp"
#include "nncabac/quantizer.hpp"
#include "nncabac/tensor.hpp"
#include "nncabac/tensor_io.hpp"

namespace nncabac {

// Grid floor used in place of sigma_min when no sigma map exists.
inline constexpr double kDefaultGridFloorDivisor = 1024.0;

struct EncoderOptions {
  RdConfig rd;
  int s = 64;
  bool uniform_eta = false;           // ignore sigma maps for eta even when present
  std::optional<double> grid_floor;   // default w_max / 1024
  unsigned threads = 1;
};

struct LayerResult {
  CodedLayer coded;
  QuantIndexTensor indices;
  QuantGrid grid;
  double distortion = 0.0;  // weighted with the eta actually used
};

inline WeightStats layer_stats(const CodableLayer& layer, std::optional<double> grid_floor) {
  WeightStats st;
  st.w_max = 0.0;
  for (float v : layer.weights.values) st.w_max = std::max(st.w_max, std::fabs(double{v}));
  if (!layer.sigmas.empty()) {
    st.sigma_min = *std::min_element(layer.sigmas.begin(), layer.sigmas.end());
  } else if (grid_floor) {
    if (!(*grid_floor > 0.0)) throw InputError("grid floor must be > 0");
    st.sigma_min = *grid_floor;
  } else {
    st.sigma_min = st.w_max > 0.0 ? st.w_max / kDefaultGridFloorDivisor : 1.0;
  }
  return st;
}

inline LayerResult encode_layer(const CodableLayer& layer, const EncoderOptions& opt) {
  const auto& w = layer.weights;
  if (w.rows > UINT32_MAX || w.cols > UINT32_MAX) {
    throw InputError("layer '" + w.name + "': matrix dims exceed 32 bits");
  }
  RdConfig cfg = opt.rd;
  cfg.eta_mode = (!layer.sigmas.empty() && !opt.uniform_eta) ? EtaMode::kFromSigma : EtaMode::kUniform;

  LayerResult out;
  out.grid = build_grid(layer_stats(layer, opt.grid_floor), opt.s);
  auto quant = rd_quantize_layer(w, layer.sigmas, out.grid, cfg);
  out.indices = std::move(quant.indices);

  std::uint64_t max_mag = 0;
  for (auto v : out.indices.indices) max_mag = std::max<std::uint64_t>(max_mag, std::llabs(v));
  const BinarizationParams params{cfg.n_flags, remainder_bits_for(max_mag, cfg.n_flags)};

  ContextSet ctx(cfg.n_flags, cfg.adaptation_shift);
  ArithEncoder enc;
  encode_tensor(out.indices, params, ctx, enc);
  if (!(ctx == quant.contexts)) {
    throw InvariantError("layer '" + w.name + "': coder contexts diverged from quantizer contexts");
  }

  auto& h = out.coded.header;
  h.name = w.name;
  h.orig_shape = w.orig_shape;
  h.rows = static_cast<std::uint32_t>(w.rows);
  h.cols = static_cast<std::uint32_t>(w.cols);
  h.delta = out.grid.delta;
  h.s = static_cast<std::uint32_t>(out.grid.s);
  h.n_flags = static_cast<std::uint8_t>(params.n_flags);
  h.remainder_bits = static_cast<std::uint8_t>(params.remainder_bits);
  h.adaptation_shift = static_cast<std::uint8_t>(cfg.adaptation_shift);
  out.coded.payload = enc.terminate();

  const std::span<const float> eta_sigmas =
      cfg.eta_mode == EtaMode::kFromSigma ? std::span<const float>(layer.sigmas) : std::span<const float>{};
  out.distortion = weighted_distortion(w.values, out.indices, out.grid, eta_sigmas);
  return out;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
// rethrown for the lowest failing index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), count));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::vector<LayerResult> encode_layers(std::span<const CodableLayer> layers,
                                              const EncoderOptions& opt) {
  opt.rd.validate();
  std::vector<LayerResult> results(layers.size());
  parallel_for(layers.size(), opt.threads,
               [&](std::size_t i) { results[i] = encode_layer(layers[i], opt); });
  return results;
}

inline ModelBitstream assemble(const std::vector<LayerResult>& results) {
  ModelBitstream model;
  model.layers.reserve(results.size());
  for (const auto& r : results) model.layers.push_back(r.coded);
  return model;
}

inline QuantIndexTensor decode_indices(const CodedLayer& layer) {
  const auto& h = layer.header;
  ContextSet ctx(h.n_flags, h.adaptation_shift);
  ArithDecoder dec(layer.payload);
  try {
    return decode_tensor(h.rows, h.cols, h.binarization(), ctx, dec);
  } catch (const CodingError& e) {
    throw CodingError("layer '" + h.name + "': " + e.what());
  }
}

// Reconstructed weights, delta * I, in the layer's matrix form.
inline WeightTensor decode_layer(const CodedLayer& layer) {
  const auto& h = layer.header;
  const auto q = decode_indices(layer);
  QuantGrid grid;
  grid.delta = h.delta;
  grid.s = static_cast<std::int32_t>(h.s);
  WeightTensor w;
  w.name = h.name;
  w.orig_shape = h.orig_shape;
  w.rows = h.rows;
  w.cols = h.cols;
  w.values = dequantize(q, grid);
  return w;
}

}  // namespace nncabac

#endif  // NNCABAC_CODEC_HPP_
