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

#ifndef NNCABAC_QUANTIZER_HPP_
#define NNCABAC_QUANTIZER_HPP_

// Weighted rate-distortion quantization onto an equidistant grid.
//
// Each weight w_i is mapped to the grid index I minimizing
//     eta_i * (w_i - delta * I)^2 + lambda * R(I)
// where R(I) is the cost of I's bin string under the context models as they
// stand at that scan position. After the choice the models are updated with
// the chosen bins, exactly as the entropy coder will later do, so the rate
// seen by the quantizer is the rate the coder realizes for regular bins.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nncabac/binarizer.hpp"
#include "nncabac/context_model.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/tensor.hpp"

namespace nncabac {

inline constexpr std::int64_t kMaxGridIndex = std::int64_t{1} << kMaxRemainderBits;

struct WeightStats {
  double w_max = 0.0;      // largest weight magnitude
  double sigma_min = 1.0;  // smallest standard deviation, or the grid floor
};

struct QuantGrid {
  double delta = 1.0;
  std::int32_t s = 0;
  std::int32_t max_abs_index = 0;

  bool degenerate() const { return max_abs_index == 0; }
};

enum class EtaMode { kUniform, kFromSigma };

struct RdConfig {
  double lambda = 0.01;
  EtaMode eta_mode = EtaMode::kUniform;
  int search_halfwidth = 2;
  unsigned n_flags = 4;
  unsigned adaptation_shift = ContextModel::kDefaultShift;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw InputError("lambda must be finite and >= 0, got " + std::to_string(lambda));
    }
    if (search_halfwidth < 1) {
      throw InputError("search half-width must be >= 1, got " + std::to_string(search_halfwidth));
    }
    if (n_flags > kMaxFlags) throw InputError("n_flags must be <= " + std::to_string(kMaxFlags));
    if (adaptation_shift < 1 || adaptation_shift > 15) {
      throw InputError("adaptation shift must be in [1, 15], got " +
                       std::to_string(adaptation_shift));
    }
  }
};

// delta = 2|w_max| / (2|w_max| / sigma_min + S). An all-zero layer gets
// delta = sigma_min and a single grid point at 0.
inline QuantGrid build_grid(const WeightStats& stats, int s) {
  if (!(stats.sigma_min > 0.0) || !std::isfinite(stats.sigma_min)) {
    throw InputError("sigma_min must be finite and > 0, got " + std::to_string(stats.sigma_min));
  }
  if (!(stats.w_max >= 0.0) || !std::isfinite(stats.w_max)) {
    throw InputError("w_max must be finite and >= 0, got " + std::to_string(stats.w_max));
  }
  if (s < 0) throw InputError("S must be >= 0, got " + std::to_string(s));

  QuantGrid g;
  g.s = s;
  if (stats.w_max == 0.0) {
    g.delta = stats.sigma_min;
    g.max_abs_index = 0;
    return g;
  }
  const double two_w = 2.0 * stats.w_max;
  g.delta = two_w / (two_w / stats.sigma_min + static_cast<double>(s));
  double steps = std::ceil(stats.w_max / g.delta);
  if (steps * g.delta < stats.w_max) steps += 1.0;
  if (!(steps <= static_cast<double>(kMaxGridIndex))) {
    throw InputError("quantization grid too fine: w_max/delta = " +
                     std::to_string(stats.w_max / g.delta) + " exceeds " +
                     std::to_string(kMaxGridIndex) + "; raise sigma_min or the grid floor");
  }
  g.max_abs_index = static_cast<std::int32_t>(steps);
  return g;
}

// Remainder width the quantizer assumes when pricing: wide enough for any
// index the grid can produce.
inline unsigned pricing_remainder_bits(const QuantGrid& grid, unsigned n_flags) {
  return remainder_bits_for(static_cast<std::uint64_t>(grid.max_abs_index), n_flags);
}

// Bin-string costs of every index under a frozen context state, O(1) per
// index after O(n) setup.
class RatePricer {
 public:
  RatePricer(const ContextSet& ctx, unsigned remainder_bits)
      : sig0_(ctx.sig.bit_cost(false)),
        nonzero_base_{ctx.sig.bit_cost(true) + ctx.sign.bit_cost(false),
                      ctx.sig.bit_cost(true) + ctx.sign.bit_cost(true)},
        remainder_cost_(std::uint64_t{remainder_bits} * kBypassCost) {
    const std::size_t n = ctx.gr.size();
    ones_prefix_.resize(n + 1, 0);
    zero_at_.resize(n + 1, 0);
    for (std::size_t k = 1; k <= n; ++k) {
      ones_prefix_[k] = ones_prefix_[k - 1] + ctx.gr[k - 1].bit_cost(true);
      zero_at_[k] = ctx.gr[k - 1].bit_cost(false);
    }
  }

  std::uint64_t rate(std::int64_t v) const {
    if (v == 0) return sig0_;
    const std::uint64_t m = static_cast<std::uint64_t>(std::llabs(v));
    const std::uint64_t n = ones_prefix_.size() - 1;
    std::uint64_t r = nonzero_base_[v < 0 ? 1 : 0];
    if (m <= n) return r + ones_prefix_[m - 1] + zero_at_[m];
    return r + ones_prefix_[n] + remainder_cost_;
  }

 private:
  std::uint64_t sig0_;
  std::uint64_t nonzero_base_[2];
  std::uint64_t remainder_cost_;
  std::vector<std::uint64_t> ones_prefix_;
  std::vector<std::uint64_t> zero_at_;
};

// eta * (w - delta * index)^2 + lambda * rate, rate in Cost units.
inline double rd_cost(double w, double eta, double delta, std::int64_t index, double lambda,
                      std::uint64_t rate) {
  const double d = w - delta * static_cast<double>(index);
  return eta * d * d + lambda * cost_to_bits(rate);
}

// True if candidate a should replace incumbent b at equal cost: smaller
// magnitude first, then non-negative.
inline bool preferred_on_tie(std::int64_t a, std::int64_t b) {
  const auto ma = std::llabs(a), mb = std::llabs(b);
  if (ma != mb) return ma < mb;
  return a >= 0 && b < 0;
}

// Advances the contexts over v's bin string without producing output.
inline void commit_index(std::int64_t v, const BinarizationParams& p, ContextSet& ctx) {
  visit_bins(v, p, [&](BinChannel c, unsigned k, bool b) {
    if (c != BinChannel::kRemainder) detail::model_for(ctx, c, k).update(b);
  });
}

// Chooses the index for one weight and commits it to the contexts. The
// candidates are 0 and every index within search_halfwidth of round(w/delta),
// clipped to the grid.
inline std::int32_t rd_quantize_weight(double w, double eta, const QuantGrid& grid,
                                       const RdConfig& cfg, ContextSet& ctx) {
  const BinarizationParams params{cfg.n_flags, pricing_remainder_bits(grid, cfg.n_flags)};
  const RatePricer pricer(ctx, params.remainder_bits);

  std::int64_t best = 0;
  double best_cost = rd_cost(w, eta, grid.delta, 0, cfg.lambda, pricer.rate(0));

  const std::int64_t limit = grid.max_abs_index;
  const double ratio = w / grid.delta;
  const std::int64_t center =
      std::isfinite(ratio) ? static_cast<std::int64_t>(
                                 std::clamp(std::round(ratio), -static_cast<double>(limit),
                                            static_cast<double>(limit)))
                           : 0;
  const std::int64_t lo = std::max(center - cfg.search_halfwidth, -limit);
  const std::int64_t hi = std::min(center + cfg.search_halfwidth, limit);
  for (std::int64_t k = lo; k <= hi; ++k) {
    if (k == 0) continue;
    const double c = rd_cost(w, eta, grid.delta, k, cfg.lambda, pricer.rate(k));
    if (c < best_cost || (c == best_cost && preferred_on_tie(k, best))) {
      best = k;
      best_cost = c;
    }
  }
  commit_index(best, params, ctx);
  return static_cast<std::int32_t>(best);
}

struct LayerQuantization {
  QuantIndexTensor indices;
  ContextSet contexts;  // state after the last committed weight
};

// Quantizes a layer in row-major order. `sigmas` is either empty or holds one
// standard deviation per weight; in kFromSigma mode eta_i = 1 / sigma_i^2.
inline LayerQuantization rd_quantize_layer(const WeightTensor& w, std::span<const float> sigmas,
                                           const QuantGrid& grid, const RdConfig& cfg) {
  cfg.validate();
  if (w.values.size() != w.rows * w.cols) {
    throw InputError("layer '" + w.name + "': value count does not match its matrix dims");
  }
  if (!sigmas.empty()) {
    if (sigmas.size() != w.values.size()) {
      throw InputError("layer '" + w.name + "': sigma tensor has " + std::to_string(sigmas.size()) +
                       " values, weights have " + std::to_string(w.values.size()));
    }
    for (float s : sigmas) {
      if (!(s > 0.0f) || !std::isfinite(s)) {
        throw InputError("layer '" + w.name + "': sigma values must be finite and > 0");
      }
    }
  }
  if (cfg.eta_mode == EtaMode::kFromSigma && sigmas.empty()) {
    throw InputError("layer '" + w.name + "': eta from sigma requested but no sigma tensor given");
  }

  LayerQuantization out{{w.rows, w.cols, {}}, ContextSet(cfg.n_flags, cfg.adaptation_shift)};
  out.indices.indices.resize(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    double eta = 1.0;
    if (cfg.eta_mode == EtaMode::kFromSigma) {
      const double s = sigmas[i];
      eta = 1.0 / (s * s);
    }
    out.indices.indices[i] = rd_quantize_weight(w.values[i], eta, grid, cfg, out.contexts);
  }
  return out;
}

inline std::vector<float> dequantize(const QuantIndexTensor& q, const QuantGrid& grid) {
  std::vector<float> out(q.indices.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(grid.delta * static_cast<double>(q.indices[i]));
  }
  return out;
}

}  // namespace nncabac

#endif  // NNCABAC_QUANTIZER_HPP_
