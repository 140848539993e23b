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

// Writes the seeded synthetic models used by the tests and README examples.
//
//   make_synthetic toy    out.dcnw [--seed N]
//   make_synthetic lenet  out.dcnw [--seed N] [--zero-fraction F]

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nncabac/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic .dcnw models"};
  std::string kind;
  std::string output;
  std::uint64_t seed = 0;
  double zero_fraction = 0.9;
  app.add_option("kind", kind, "toy | lenet")->required()->check(CLI::IsMember({"toy", "lenet"}));
  app.add_option("output", output, "Output .dcnw")->required();
  app.add_option("--seed", seed, "Generator seed (0 = model default)");
  app.add_option("--zero-fraction", zero_fraction, "Fraction of zero weights (lenet)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto file = kind == "toy" ? nncabac::synthetic::toy_model(seed ? seed : 7)
                                    : nncabac::synthetic::lenet300_100(seed ? seed : 300100, zero_fraction);
    nncabac::save(output, file);
  } catch (const std::exception& e) {
    std::cerr << "make_synthetic: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
