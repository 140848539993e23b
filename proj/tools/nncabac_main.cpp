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

// nncabac: compress neural-network weight tensors.
//
//   nncabac encode  model.dcnw --output model.dcnb [--lambda L] [--s S] ...
//   nncabac decode  model.dcnb --output restored.dcnw
//   nncabac inspect model.dcnb
//   nncabac sweep   model.dcnw --output outdir [--s-range 0:256] ...
//
// Exit codes: 0 success, 2 usage or input error, 3 internal error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nncabac/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct Flags {
  std::string input;
  std::string output;
  double lambda = 0.01;
  int s = 64;
  std::string s_range = "0:256";
  unsigned n_flags = 4;
  unsigned adapt_shift = 4;
  int search_halfwidth = 2;
  bool uniform_eta = false;
  std::optional<double> grid_floor;
  unsigned threads = 1;
};

void add_coding_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--lambda", f.lambda, "Rate-distortion multiplier")->capture_default_str();
  cmd->add_option("--n-flags", f.n_flags, "Number of greater-than-k flags")->capture_default_str();
  cmd->add_option("--adapt-shift", f.adapt_shift, "Context adaptation shift")->capture_default_str();
  cmd->add_option("--search-halfwidth", f.search_halfwidth, "Candidate window around round(w/delta)")
      ->capture_default_str();
  cmd->add_flag("--uniform-eta", f.uniform_eta, "Use eta = 1 even when sigma maps are present");
  cmd->add_option("--grid-floor", f.grid_floor, "sigma_min used when a layer has no sigma map (default w_max/1024)");
  cmd->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
}

nncabac::EncoderOptions encoder_options(const Flags& f) {
  nncabac::EncoderOptions o;
  o.rd.lambda = f.lambda;
  o.rd.n_flags = f.n_flags;
  o.rd.adaptation_shift = f.adapt_shift;
  o.rd.search_halfwidth = f.search_halfwidth;
  o.s = f.s;
  o.uniform_eta = f.uniform_eta;
  o.grid_floor = f.grid_floor;
  o.threads = f.threads;
  return o;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw nncabac::InputError("--s-range expects A:B, got '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, colon), &used_a);
    const int b = std::stoi(text.substr(colon + 1), &used_b);
    if (used_a != colon || used_b != text.size() - colon - 1) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw nncabac::InputError("--s-range expects integers A:B, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-adaptive arithmetic coding of neural-network weights"};
  app.require_subcommand(1);
  Flags f;

  auto* encode = app.add_subcommand("encode", "Quantize and compress a .dcnw model");
  encode->add_option("input", f.input, "Input .dcnw")->required();
  encode->add_option("--output,-o", f.output, "Output .dcnb")->required();
  encode->add_option("--s", f.s, "Grid coarseness S")->capture_default_str();
  add_coding_flags(encode, f);

  auto* decode = app.add_subcommand("decode", "Reconstruct a .dcnw from a .dcnb");
  decode->add_option("input", f.input, "Input .dcnb")->required();
  decode->add_option("--output,-o", f.output, "Output .dcnw")->required();

  auto* inspect = app.add_subcommand("inspect", "Print the headers of a .dcnb");
  inspect->add_option("input", f.input, "Input .dcnb")->required();

  auto* sweep = app.add_subcommand("sweep", "Encode once per S and keep the smallest bitstream");
  sweep->add_option("input", f.input, "Input .dcnw")->required();
  sweep->add_option("--output,-o", f.output, "Output directory")->required();
  sweep->add_option("--s-range", f.s_range, "Inclusive S range A:B")->capture_default_str();
  add_coding_flags(sweep, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*encode) {
      nncabac::cmd_encode(f.input, f.output, encoder_options(f), std::cout);
    } else if (*decode) {
      nncabac::cmd_decode(f.input, f.output);
    } else if (*inspect) {
      nncabac::cmd_inspect(f.input, std::cout);
    } else if (*sweep) {
      const auto [a, b] = parse_range(f.s_range);
      nncabac::cmd_sweep(f.input, f.output, encoder_options(f), a, b, std::cout);
    }
  } catch (const nncabac::InvariantError& e) {
    std::cerr << "nncabac: internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const nncabac::Error& e) {
    std::cerr << "nncabac: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "nncabac: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
