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

#ifndef NNCABAC_CONTEXT_MODEL_HPP_
#define NNCABAC_CONTEXT_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nncabac/arith_coder.hpp"

namespace nncabac {

// Rate in 1/65536 bit units. Integer so that sums are exact and identical on
// every platform.
using Cost = std::uint32_t;
inline constexpr int kCostFracBits = 16;
inline constexpr double kCostScale = 1 << kCostFracBits;
inline constexpr Cost kBypassCost = Cost{1} << kCostFracBits;

inline double cost_to_bits(std::uint64_t c) { return static_cast<double>(c) / kCostScale; }

namespace detail {

// -log2(p / 32768) for every representable p, rounded to 1/65536 bit.
inline const std::vector<Cost>& cost_table() {
  static const std::vector<Cost> table = [] {
    std::vector<Cost> t(kProbOne + 1, 0);
    t[0] = static_cast<Cost>(std::lround(16.0 * kCostScale));  // unreachable, p is clamped
    for (std::uint32_t p = 1; p <= kProbOne; ++p) {
      const double bits = -std::log2(static_cast<double>(p) / kProbOne);
      t[p] = static_cast<Cost>(std::llround(bits * kCostScale));
    }
    return t;
  }();
  return table;
}

}  // namespace detail

// Adaptive estimate of P(bin = 1), 15-bit fixed point.
//
// After each observation the probability of the value NOT observed shrinks by
// 2^-shift of itself, rounded up, so repeated identical observations drive the
// estimate all the way to the clamp bound.
struct ContextModel {
  static constexpr unsigned kDefaultShift = 4;

  std::uint16_t p1 = kProbHalf;
  std::uint8_t adaptation_shift = kDefaultShift;

  ContextModel() = default;
  explicit ContextModel(unsigned shift) : adaptation_shift(static_cast<std::uint8_t>(shift)) {}

  void update(bool observed) {
    const std::uint32_t step_mask = (1u << adaptation_shift) - 1;
    if (observed) {
      const std::uint32_t p0 = kProbOne - p1;
      p1 = static_cast<std::uint16_t>(clamp_prob(p1 + ((p0 + step_mask) >> adaptation_shift)));
    } else {
      p1 = static_cast<std::uint16_t>(
          clamp_prob(p1 - std::min<std::uint32_t>(p1, (p1 + step_mask) >> adaptation_shift)));
    }
  }

  // Cost of coding `bin` under the current estimate. Does not adapt.
  Cost bit_cost(bool bin) const {
    return detail::cost_table()[bin ? p1 : kProbOne - p1];
  }

  double bits(bool bin) const { return cost_to_bits(bit_cost(bin)); }

  friend bool operator==(const ContextModel&, const ContextModel&) = default;
};

// Every context a layer uses: significance, sign, and one model per
// greater-than-k flag. Reset at the start of each layer.
struct ContextSet {
  ContextModel sig;
  ContextModel sign;
  std::vector<ContextModel> gr;

  ContextSet() = default;
  ContextSet(unsigned n_flags, unsigned adaptation_shift)
      : sig(adaptation_shift), sign(adaptation_shift), gr(n_flags, ContextModel(adaptation_shift)) {}

  unsigned n_flags() const { return static_cast<unsigned>(gr.size()); }
  std::size_t model_count() const { return gr.size() + 2; }

  // Value copy; spelled out because the quantizer relies on it.
  ContextSet clone_state() const { return *this; }

  friend bool operator==(const ContextSet&, const ContextSet&) = default;
};

}  // namespace nncabac

#endif  // NNCABAC_CONTEXT_MODEL_HPP_
