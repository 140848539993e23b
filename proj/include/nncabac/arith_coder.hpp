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

#ifndef NNCABAC_ARITH_CODER_HPP_
#define NNCABAC_ARITH_CODER_HPP_

// Binary arithmetic coder.
//
// A byte-oriented range coder with a 32-bit range register and a 33-bit low
// register. Carries out of the low register are resolved through a cached
// byte plus a count of pending 0xFF bytes, so no bit-level output is needed.
// Probabilities are 15-bit fixed point: p1 in [1, 32767] out of 32768 is the
// probability that the bin is 1. A 1 takes the lower sub-interval.
//
// Renormalization keeps range in [2^24, 2^32). Termination picks the value
// inside the final interval with the most trailing zero bits and emits only
// its significant bytes; the decoder supplies the missing zero bytes, up to
// kMaxVirtualBytes, and treats any further read as an overrun.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "nncabac/errors.hpp"

namespace nncabac {

inline constexpr int kProbBits = 15;
inline constexpr std::uint32_t kProbOne = 1u << kProbBits;  // 32768
inline constexpr std::uint32_t kProbMin = 1;
inline constexpr std::uint32_t kProbMax = kProbOne - 1;
inline constexpr std::uint32_t kProbHalf = kProbOne / 2;

inline constexpr std::uint32_t clamp_prob(std::uint32_t p1) {
  return std::clamp(p1, kProbMin, kProbMax);
}

// Anything that consumes bins the way ArithEncoder does. Lets the binarizer
// drive counting or recording coders in tests.
template <typename T>
concept BinEncoder = requires(T& t, bool bin, std::uint32_t p1) {
  t.encode_bin(bin, p1);
  t.encode_bypass(bin);
};

template <typename T>
concept BinDecoder = requires(T& t, std::uint32_t p1) {
  { t.decode_bin(p1) } -> std::convertible_to<bool>;
  { t.decode_bypass() } -> std::convertible_to<bool>;
};

class ArithEncoder {
 public:
  static constexpr std::uint32_t kTop = 1u << 24;

  void encode_bin(bool bin, std::uint32_t p1) {
    check_live();
    const std::uint32_t bound = (range_ >> kProbBits) * clamp_prob(p1);
    if (bin) {
      range_ = bound;
    } else {
      low_ += bound;
      range_ -= bound;
    }
    normalize();
  }

  void encode_bypass(bool bin) {
    check_live();
    range_ >>= 1;
    if (bin) low_ += range_;
    normalize();
  }

  // Flushes the interval and hands back the payload. The encoder is dead
  // afterwards.
  std::vector<std::uint8_t> terminate() {
    check_live();
    // Smallest value in [low, low + range) with the most trailing zeros.
    // range >= 2^24 guarantees a multiple of 2^24 exists in the interval.
    const std::uint64_t high = low_ + range_;
    for (int k = 32; k >= 0; --k) {
      const std::uint64_t step = std::uint64_t{1} << k;
      const std::uint64_t v = ((low_ + step - 1) >> k) << k;
      if (v < high) {
        low_ = v;
        break;
      }
    }
    if ((low_ & (kTop - 1)) != 0) throw InvariantError("arith coder: flush value not byte aligned");
    shift_low();
    shift_low();
    terminated_ = true;
    return std::move(out_);
  }

  bool terminated() const noexcept { return terminated_; }
  std::uint32_t range() const noexcept { return range_; }
  // Bytes already committed to the output buffer.
  std::size_t bytes_written() const noexcept { return out_.size(); }

 private:
  void check_live() const {
    if (terminated_) throw CodingError("arith encoder used after terminate()");
  }

  void normalize() {
    while (range_ < kTop) {
      range_ <<= 8;
      shift_low();
    }
  }

  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      const auto carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t byte = cache_;
      do {
        emit(static_cast<std::uint8_t>(byte + carry));
        byte = 0xFF;
      } while (--pending_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++pending_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  void emit(std::uint8_t b) {
    // The first cached byte holds the integer part of the code value, which
    // is always zero; it is never written.
    if (first_) {
      if (b != 0) throw InvariantError("arith coder: carry into leading byte");
      first_ = false;
      return;
    }
    out_.push_back(b);
  }

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 1;
  bool first_ = true;
  bool terminated_ = false;
  std::vector<std::uint8_t> out_;
};

class ArithDecoder {
 public:
  static constexpr std::uint32_t kTop = ArithEncoder::kTop;
  // The encoder's flush omits at most three trailing zero bytes.
  static constexpr int kMaxVirtualBytes = 3;

  explicit ArithDecoder(std::span<const std::uint8_t> payload) : in_(payload) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  }

  bool decode_bin(std::uint32_t p1) {
    const std::uint32_t bound = (range_ >> kProbBits) * clamp_prob(p1);
    bool bin;
    if (code_ < bound) {
      range_ = bound;
      bin = true;
    } else {
      code_ -= bound;
      range_ -= bound;
      bin = false;
    }
    normalize();
    return bin;
  }

  bool decode_bypass() {
    range_ >>= 1;
    bool bin = false;
    if (code_ >= range_) {
      code_ -= range_;
      bin = true;
    }
    normalize();
    return bin;
  }

  std::size_t bytes_consumed() const noexcept { return pos_; }

 private:
  void normalize() {
    while (range_ < kTop) {
      range_ <<= 8;
      code_ = (code_ << 8) | next_byte();
    }
  }

  std::uint32_t next_byte() {
    if (pos_ < in_.size()) return in_[pos_++];
    if (virtual_ < kMaxVirtualBytes) {
      ++virtual_;
      return 0;
    }
    throw CodingError("arith decoder read past end of payload (" + std::to_string(in_.size()) +
                      " bytes)");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  int virtual_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

}  // namespace nncabac

#endif  // NNCABAC_ARITH_CODER_HPP_
