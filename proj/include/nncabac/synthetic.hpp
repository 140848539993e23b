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

#ifndef NNCABAC_SYNTHETIC_HPP_
#define NNCABAC_SYNTHETIC_HPP_

// Seeded synthetic models for tests, benchmarks and the bundled toy file.

#include <cstdint>
#include <random>
#include <string>

#include "nncabac/tensor.hpp"
#include "nncabac/tensor_io.hpp"

namespace nncabac::synthetic {

// Gaussian values with a given fraction forced to exactly zero.
inline Tensor sparse_gaussian(Shape dims, double zero_fraction, double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  std::bernoulli_distribution is_zero(zero_fraction);
  Tensor t{std::move(dims), {}};
  t.values.resize(element_count(t.dims));
  for (auto& v : t.values) {
    const double x = normal(rng);
    v = is_zero(rng) ? 0.0f : static_cast<float>(x);
  }
  return t;
}

inline Tensor uniform(Shape dims, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t{std::move(dims), {}};
  t.values.resize(element_count(t.dims));
  for (auto& v : t.values) v = static_cast<float>(dist(rng));
  return t;
}

// Two coded layers (a 3x3 convolution with a sigma map and a dense layer
// without one) plus two excluded biases.
inline TensorFile toy_model(std::uint64_t seed = 7) {
  TensorFile f;
  f.entries.push_back({"conv1.weight", TensorRole::kWeight, sparse_gaussian({8, 3, 3, 3}, 0.5, 0.1, seed)});
  f.entries.push_back({"conv1.weight", TensorRole::kSigma, uniform({8, 3, 3, 3}, 0.01, 0.05, seed + 1)});
  f.entries.push_back({"conv1.bias", TensorRole::kExcluded, uniform({8}, -0.1, 0.1, seed + 2)});
  f.entries.push_back({"fc1.weight", TensorRole::kWeight, sparse_gaussian({16, 72}, 0.8, 0.05, seed + 3)});
  f.entries.push_back({"fc1.bias", TensorRole::kExcluded, uniform({16}, -0.1, 0.1, seed + 4)});
  return f;
}

// Dense layers shaped like LeNet-300-100 (784x300, 300x100, 100x10) with a
// given fraction of zero weights and Gaussian nonzeros.
inline TensorFile lenet300_100(std::uint64_t seed = 300100, double zero_fraction = 0.9,
                               double stddev = 0.05) {
  TensorFile f;
  f.entries.push_back({"fc1.weight", TensorRole::kWeight, sparse_gaussian({784, 300}, zero_fraction, stddev, seed)});
  f.entries.push_back({"fc1.bias", TensorRole::kExcluded, uniform({300}, -0.1, 0.1, seed + 1)});
  f.entries.push_back({"fc2.weight", TensorRole::kWeight, sparse_gaussian({300, 100}, zero_fraction, stddev, seed + 2)});
  f.entries.push_back({"fc2.bias", TensorRole::kExcluded, uniform({100}, -0.1, 0.1, seed + 3)});
  f.entries.push_back({"fc3.weight", TensorRole::kWeight, sparse_gaussian({100, 10}, zero_fraction, stddev, seed + 4)});
  f.entries.push_back({"fc3.bias", TensorRole::kExcluded, uniform({10}, -0.1, 0.1, seed + 5)});
  return f;
}

}  // namespace nncabac::synthetic

#endif  // NNCABAC_SYNTHETIC_HPP_
