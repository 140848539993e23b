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

#ifndef NNCABAC_METRICS_HPP_
#define NNCABAC_METRICS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "nncabac/errors.hpp"
#include "nncabac/quantizer.hpp"
#include "nncabac/tensor.hpp"

namespace nncabac {

struct CompressionRatio {
  double percent = 0.0;  // compressed / original * 100
  double factor = 0.0;   // original / compressed
};

inline CompressionRatio compression_ratio(double original_bytes, double compressed_bytes) {
  if (!(original_bytes > 0.0)) throw InputError("compression ratio: original size must be > 0");
  CompressionRatio r;
  r.percent = compressed_bytes / original_bytes * 100.0;
  r.factor = compressed_bytes > 0.0 ? original_bytes / compressed_bytes
                                    : std::numeric_limits<double>::infinity();
  return r;
}

// Fraction of nonzero indices, |{I != 0}| / |I|.
inline double sparsity(const QuantIndexTensor& q) {
  if (q.indices.empty()) throw InputError("sparsity of an empty tensor");
  std::size_t nz = 0;
  for (auto v : q.indices) nz += v != 0;
  return static_cast<double>(nz) / static_cast<double>(q.indices.size());
}

// sum_i eta_i (w_i - delta I_i)^2 with eta_i = 1 / sigma_i^2, or 1 when no
// sigmas are given.
inline double weighted_distortion(std::span<const float> w, const QuantIndexTensor& q,
                                  const QuantGrid& grid, std::span<const float> sigmas = {}) {
  if (w.size() != q.indices.size()) {
    throw InputError("distortion: " + std::to_string(w.size()) + " weights vs " +
                     std::to_string(q.indices.size()) + " indices");
  }
  if (!sigmas.empty() && sigmas.size() != w.size()) {
    throw InputError("distortion: sigma count does not match weight count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = static_cast<double>(w[i]) - grid.delta * q.indices[i];
    const double eta = sigmas.empty() ? 1.0 : 1.0 / (double{sigmas[i]} * sigmas[i]);
    sum += eta * d * d;
  }
  return sum;
}

inline std::map<std::int32_t, std::uint64_t> histogram(const QuantIndexTensor& q) {
  std::map<std::int32_t, std::uint64_t> h;
  for (auto v : q.indices) ++h[v];
  return h;
}

// First-order entropy of the index distribution in bits per symbol.
inline double empirical_entropy(const QuantIndexTensor& q) {
  if (q.indices.empty()) throw InputError("entropy of an empty tensor");
  const double n = static_cast<double>(q.indices.size());
  double h = 0.0;
  for (const auto& [sym, count] : histogram(q)) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// Code lengths of an optimal prefix code for the given symbol counts. A lone
// symbol still gets one bit.
inline std::map<std::int32_t, unsigned> huffman_code_lengths(
    const std::map<std::int32_t, std::uint64_t>& counts) {
  std::map<std::int32_t, unsigned> lengths;
  if (counts.empty()) return lengths;
  if (counts.size() == 1) {
    lengths[counts.begin()->first] = 1;
    return lengths;
  }
  // Nodes 0..k-1 are leaves in symbol order; internal nodes follow.
  struct Node {
    std::uint64_t weight;
    std::size_t id;
  };
  auto heavier = [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(heavier)> heap(heavier);
  std::vector<std::size_t> parent;
  std::vector<std::int32_t> symbols;
  for (const auto& [sym, count] : counts) {
    heap.push({count, parent.size()});
    parent.push_back(0);
    symbols.push_back(sym);
  }
  while (heap.size() > 1) {
    const Node a = heap.top();
    heap.pop();
    const Node b = heap.top();
    heap.pop();
    const std::size_t id = parent.size();
    parent.push_back(id);  // root points at itself until merged
    parent[a.id] = id;
    parent[b.id] = id;
    heap.push({a.weight + b.weight, id});
  }
  const std::size_t root = parent.size() - 1;
  for (std::size_t leaf = 0; leaf < symbols.size(); ++leaf) {
    unsigned depth = 0;
    for (std::size_t n = leaf; n != root; n = parent[n]) ++depth;
    lengths[symbols[leaf]] = depth;
  }
  return lengths;
}

// Size of the indices under a canonical scalar Huffman code. The table is
// charged 32 bits for the symbol count plus, per distinct symbol, a 32-bit
// symbol value and an 8-bit code length.
struct HuffmanBaseline {
  std::uint64_t payload_bits = 0;
  std::uint64_t table_bits = 0;
  std::size_t distinct_symbols = 0;

  std::uint64_t total_bits() const { return payload_bits + table_bits; }
};

inline constexpr std::uint64_t kHuffmanTableHeaderBits = 32;
inline constexpr std::uint64_t kHuffmanTableEntryBits = 32 + 8;

inline HuffmanBaseline huffman_baseline(const QuantIndexTensor& q) {
  if (q.indices.empty()) throw InputError("huffman baseline of an empty tensor");
  const auto counts = histogram(q);
  const auto lengths = huffman_code_lengths(counts);
  HuffmanBaseline out;
  out.distinct_symbols = counts.size();
  for (const auto& [sym, count] : counts) out.payload_bits += count * lengths.at(sym);
  out.table_bits = kHuffmanTableHeaderBits + kHuffmanTableEntryBits * counts.size();
  return out;
}

}  // namespace nncabac

#endif  // NNCABAC_METRICS_HPP_
