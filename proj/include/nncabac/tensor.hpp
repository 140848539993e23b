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

#ifndef NNCABAC_TENSOR_HPP_
#define NNCABAC_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nncabac/errors.hpp"

namespace nncabac {

using Shape = std::vector<std::uint32_t>;

inline std::uint64_t element_count(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::uint64_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

// Uncompressed float32 tensor in row-major order.
struct Tensor {
  Shape dims;
  std::vector<float> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// A codable parameter tensor in its 2-D matrix form.
struct WeightTensor {
  std::string name;
  Shape orig_shape;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;  // rows * cols, row-major

  std::size_t size() const { return values.size(); }
  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Quantization indices I_k of a layer in row-major scan order.
struct QuantIndexTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> indices;

  std::size_t size() const { return indices.size(); }
  std::int32_t at(std::size_t r, std::size_t c) const { return indices[r * cols + c]; }

  friend bool operator==(const QuantIndexTensor&, const QuantIndexTensor&) = default;
};

// Matrix form of a rank-2 or rank-4 tensor. A convolution kernel
// (out_ch, in_ch, kh, kw) becomes (out_ch, in_ch * kh * kw) with in_ch-major,
// then kh, then kw ordering inside a row. That ordering is exactly the
// row-major layout of the kernel, so the values are reused as is.
inline WeightTensor matrixify(std::string name, Tensor raw) {
  const auto& d = raw.dims;
  WeightTensor out;
  if (d.size() == 2) {
    out.rows = d[0];
    out.cols = d[1];
  } else if (d.size() == 4) {
    out.rows = d[0];
    out.cols = std::size_t{d[1]} * d[2] * d[3];
  } else {
    throw InputError("matrixify: unsupported rank " + std::to_string(d.size()) + " for tensor '" +
                     name + "' (expected 2 or 4)");
  }
  if (raw.values.size() != out.rows * out.cols) {
    throw InputError("matrixify: tensor '" + name + "' has " + std::to_string(raw.values.size()) +
                     " values for shape " + shape_string(d));
  }
  out.name = std::move(name);
  out.orig_shape = std::move(raw.dims);
  out.values = std::move(raw.values);
  return out;
}

// Inverse of matrixify.
inline Tensor unmatrixify(const WeightTensor& w) { return Tensor{w.orig_shape, w.values}; }

}  // namespace nncabac

#endif  // NNCABAC_TENSOR_HPP_
