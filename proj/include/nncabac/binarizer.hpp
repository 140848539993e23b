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

#ifndef NNCABAC_BINARIZER_HPP_
#define NNCABAC_BINARIZER_HPP_

// Binarization of quantization indices.
//
// An index v is coded as
//   sig            regular   v != 0
//   sign           regular   v < 0                    (only if v != 0)
//   gr_1 .. gr_n   regular   |v| > k, truncated at the first 0 flag
//   remainder      bypass    |v| - n - 1 in remainder_bits bits, MSB first
//                            (only if |v| > n)
// Indices are visited in row-major order and every regular bin adapts its
// own context model.

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "nncabac/arith_coder.hpp"
#include "nncabac/context_model.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/tensor.hpp"

namespace nncabac {

inline constexpr unsigned kMaxRemainderBits = 30;
inline constexpr unsigned kMaxFlags = 255;

enum class BinChannel : std::uint8_t { kSig, kSign, kGreater, kRemainder };

struct Bin {
  BinChannel channel;
  unsigned k;  // flag number for kGreater (1-based), bit position for kRemainder
  bool value;

  friend bool operator==(const Bin&, const Bin&) = default;
};

struct BinarizationParams {
  unsigned n_flags = 4;
  unsigned remainder_bits = 0;

  std::uint64_t max_magnitude() const {
    return std::uint64_t{n_flags} + (std::uint64_t{1} << remainder_bits);
  }
};

// Smallest remainder width that can represent every magnitude up to
// max_magnitude.
inline unsigned remainder_bits_for(std::uint64_t max_magnitude, unsigned n_flags) {
  if (max_magnitude <= n_flags) return 0;
  const std::uint64_t largest_remainder = max_magnitude - n_flags - 1;
  return static_cast<unsigned>(std::bit_width(largest_remainder));
}

// Number of bins an index produces.
inline std::size_t bin_count(std::int64_t v, const BinarizationParams& p) {
  if (v == 0) return 1;
  const std::uint64_t m = static_cast<std::uint64_t>(std::llabs(v));
  return 2 + std::min<std::uint64_t>(m, p.n_flags) + (m > p.n_flags ? p.remainder_bits : 0);
}

inline void check_encodable(std::int64_t v, const BinarizationParams& p) {
  if (static_cast<std::uint64_t>(std::llabs(v)) > p.max_magnitude()) {
    throw InputError("index " + std::to_string(v) + " exceeds the codable magnitude " +
                     std::to_string(p.max_magnitude()) + " (n_flags=" + std::to_string(p.n_flags) +
                     ", remainder_bits=" + std::to_string(p.remainder_bits) + ")");
  }
}

// Calls visit(channel, k, value) for each bin of v in coding order.
template <typename Visitor>
void visit_bins(std::int64_t v, const BinarizationParams& p, Visitor&& visit) {
  check_encodable(v, p);
  if (v == 0) {
    visit(BinChannel::kSig, 0u, false);
    return;
  }
  visit(BinChannel::kSig, 0u, true);
  visit(BinChannel::kSign, 0u, v < 0);
  const std::uint64_t m = static_cast<std::uint64_t>(std::llabs(v));
  for (unsigned k = 1; k <= p.n_flags; ++k) {
    const bool greater = m > k;
    visit(BinChannel::kGreater, k, greater);
    if (!greater) return;
  }
  const std::uint64_t rem = m - p.n_flags - 1;
  for (unsigned b = p.remainder_bits; b-- > 0;) {
    visit(BinChannel::kRemainder, b, ((rem >> b) & 1u) != 0);
  }
}

inline std::vector<Bin> binarize_index(std::int64_t v, const BinarizationParams& p) {
  std::vector<Bin> bins;
  visit_bins(v, p, [&](BinChannel c, unsigned k, bool b) { bins.push_back({c, k, b}); });
  return bins;
}

namespace detail {

inline void check_contexts(const ContextSet& ctx, const BinarizationParams& p) {
  if (ctx.n_flags() != p.n_flags) {
    throw InputError("context set has " + std::to_string(ctx.n_flags()) +
                     " greater-than flags, binarization expects " + std::to_string(p.n_flags));
  }
  if (p.remainder_bits > kMaxRemainderBits) {
    throw InputError("remainder width " + std::to_string(p.remainder_bits) + " exceeds " +
                     std::to_string(kMaxRemainderBits));
  }
}

inline ContextModel& model_for(ContextSet& ctx, BinChannel c, unsigned k) {
  switch (c) {
    case BinChannel::kSig: return ctx.sig;
    case BinChannel::kSign: return ctx.sign;
    default: return ctx.gr[k - 1];
  }
}

}  // namespace detail

template <BinEncoder Encoder>
void encode_index(std::int64_t v, const BinarizationParams& p, ContextSet& ctx, Encoder& enc) {
  visit_bins(v, p, [&](BinChannel c, unsigned k, bool b) {
    if (c == BinChannel::kRemainder) {
      enc.encode_bypass(b);
      return;
    }
    ContextModel& m = detail::model_for(ctx, c, k);
    enc.encode_bin(b, m.p1);
    m.update(b);
  });
}

template <BinDecoder Decoder>
std::int32_t decode_index(const BinarizationParams& p, ContextSet& ctx, Decoder& dec) {
  auto regular = [&](ContextModel& m) {
    const bool b = dec.decode_bin(m.p1);
    m.update(b);
    return b;
  };
  if (!regular(ctx.sig)) return 0;
  const bool negative = regular(ctx.sign);
  std::uint64_t m = 1;
  bool all_greater = true;
  for (unsigned k = 1; k <= p.n_flags; ++k) {
    if (!regular(ctx.gr[k - 1])) {
      all_greater = false;
      break;
    }
    m = k + 1;
  }
  if (all_greater) {
    std::uint64_t rem = 0;
    for (unsigned b = 0; b < p.remainder_bits; ++b) rem = (rem << 1) | (dec.decode_bypass() ? 1u : 0u);
    m = std::uint64_t{p.n_flags} + 1 + rem;
  }
  const auto mag = static_cast<std::int32_t>(m);
  return negative ? -mag : mag;
}

// Codes every index in row-major order.
template <BinEncoder Encoder>
void encode_tensor(const QuantIndexTensor& q, const BinarizationParams& p, ContextSet& ctx,
                   Encoder& enc) {
  detail::check_contexts(ctx, p);
  if (q.indices.size() != q.rows * q.cols) {
    throw InputError("index tensor holds " + std::to_string(q.indices.size()) + " values for " +
                     std::to_string(q.rows) + "x" + std::to_string(q.cols));
  }
  for (std::int32_t v : q.indices) encode_index(v, p, ctx, enc);
}

template <BinDecoder Decoder>
QuantIndexTensor decode_tensor(std::size_t rows, std::size_t cols, const BinarizationParams& p,
                               ContextSet& ctx, Decoder& dec) {
  detail::check_contexts(ctx, p);
  QuantIndexTensor q{rows, cols, {}};
  q.indices.resize(rows * cols);
  for (auto& v : q.indices) v = decode_index(p, ctx, dec);
  return q;
}

}  // namespace nncabac

#endif  // NNCABAC_BINARIZER_HPP_
