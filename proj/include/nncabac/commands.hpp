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

#ifndef NNCABAC_COMMANDS_HPP_
#define NNCABAC_COMMANDS_HPP_

// Implementations behind the nncabac command-line tool. Reports are written
// as one record per line of space-separated name=value fields.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nncabac/bitstream.hpp"
#include "nncabac/codec.hpp"
#include "nncabac/errors.hpp"
#include "nncabac/metrics.hpp"
#include "nncabac/tensor_io.hpp"

namespace nncabac {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

// Accumulates name=value fields for one report line.
class Record {
 public:
  explicit Record(std::string kind) { line_ = "record=" + kind; }

  Record& add(const std::string& key, const std::string& value) {
    line_ += " " + key + "=" + value;
    return *this;
  }
  Record& add(const std::string& key, double value) { return add(key, detail::fmt_double(value)); }
  Record& add(const std::string& key, std::uint64_t value) { return add(key, std::to_string(value)); }
  Record& add(const std::string& key, std::int64_t value) { return add(key, std::to_string(value)); }
  Record& add(const std::string& key, unsigned value) { return add(key, std::uint64_t{value}); }
  Record& add(const std::string& key, int value) { return add(key, std::int64_t{value}); }

  const std::string& str() const { return line_; }

 private:
  std::string line_;
};

inline std::ostream& operator<<(std::ostream& os, const Record& r) { return os << r.str() << '\n'; }

struct EncodeSummary {
  std::vector<LayerResult> layers;
  std::vector<std::uint8_t> bitstream;
  std::uint64_t weight_count = 0;
  double distortion = 0.0;
};

// Encodes every codable layer of an already loaded tensor file.
inline EncodeSummary encode_model(const TensorFile& file, const EncoderOptions& opt) {
  const auto codable = select_codable(file);
  EncodeSummary out;
  out.layers = encode_layers(codable, opt);
  out.bitstream = serialize(assemble(out.layers));
  for (const auto& l : out.layers) {
    out.weight_count += l.indices.size();
    out.distortion += l.distortion;
  }
  return out;
}

inline void report_encode(const EncodeSummary& s, std::ostream& os) {
  for (const auto& l : s.layers) {
    const auto& h = l.coded.header;
    const std::uint64_t n = l.indices.size();
    const double payload_bits = 8.0 * static_cast<double>(l.coded.payload.size());
    Record r("layer");
    r.add("name", h.name)
        .add("rows", std::uint64_t{h.rows})
        .add("cols", std::uint64_t{h.cols})
        .add("delta", h.delta)
        .add("s", std::uint64_t{h.s})
        .add("n_flags", unsigned{h.n_flags})
        .add("remainder_bits", unsigned{h.remainder_bits})
        .add("nonzero_fraction", n ? sparsity(l.indices) : 0.0)
        .add("payload_bytes", std::uint64_t{l.coded.payload.size()})
        .add("bits_per_weight", n ? payload_bits / static_cast<double>(n) : 0.0)
        .add("ratio_pct", n ? compression_ratio(4.0 * n, payload_bits / 8.0).percent : 0.0)
        .add("distortion", l.distortion);
    os << r;
  }
  const double original = 4.0 * static_cast<double>(s.weight_count);
  const double compressed = static_cast<double>(s.bitstream.size());
  Record t("total");
  t.add("layers", std::uint64_t{s.layers.size()})
      .add("weights", s.weight_count)
      .add("original_bytes", static_cast<std::uint64_t>(original))
      .add("compressed_bytes", std::uint64_t{s.bitstream.size()})
      .add("bits_per_weight", s.weight_count ? 8.0 * compressed / s.weight_count : 0.0)
      .add("ratio_pct", s.weight_count ? compression_ratio(original, compressed).percent : 0.0)
      .add("distortion", s.distortion);
  os << t;
}

inline EncodeSummary cmd_encode(const std::filesystem::path& input, const std::filesystem::path& output,
                                const EncoderOptions& opt, std::ostream& report) {
  auto summary = encode_model(load(input), opt);
  write_file(output, summary.bitstream);
  report_encode(summary, report);
  return summary;
}

// Reconstructs a .dcnw from a .dcnb: one weight entry per layer, original
// shapes restored.
inline TensorFile decode_model(std::span<const std::uint8_t> bitstream) {
  const auto model = parse(bitstream);
  TensorFile file;
  for (const auto& layer : model.layers) {
    const auto w = decode_layer(layer);
    file.entries.push_back({w.name, TensorRole::kWeight, unmatrixify(w)});
  }
  return file;
}

inline void cmd_decode(const std::filesystem::path& input, const std::filesystem::path& output) {
  save(output, decode_model(read_file(input)));
}

inline void cmd_inspect(const std::filesystem::path& input, std::ostream& os) {
  const auto model = parse(read_file(input));
  os << "version " << model.version << '\n';
  os << model.layers.size() << " layers\n";
  for (const auto& l : model.layers) {
    const auto& h = l.header;
    Record r("layer");
    r.add("name", h.name)
        .add("shape", shape_string(h.orig_shape))
        .add("rows", std::uint64_t{h.rows})
        .add("cols", std::uint64_t{h.cols})
        .add("delta", h.delta)
        .add("s", std::uint64_t{h.s})
        .add("n_flags", unsigned{h.n_flags})
        .add("remainder_bits", unsigned{h.remainder_bits})
        .add("adaptation_shift", unsigned{h.adaptation_shift})
        .add("payload_len", std::uint64_t{l.payload.size()});
    os << r;
  }
}

struct SweepRow {
  int s = 0;
  std::uint64_t compressed_bytes = 0;
  double distortion = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int best_s = 0;
  std::vector<std::uint8_t> best_bitstream;
};

// Encodes the model once per S in [s_begin, s_end] and keeps the smallest
// bitstream; ties go to the smaller S. S values run in parallel, layers within
// one S sequentially.
inline SweepResult sweep_model(const TensorFile& file, EncoderOptions opt, int s_begin, int s_end) {
  if (s_begin < 0 || s_end < s_begin) {
    throw InputError("empty or negative S range " + std::to_string(s_begin) + ":" +
                     std::to_string(s_end));
  }
  opt.rd.validate();
  const auto codable = select_codable(file);
  const std::size_t count = static_cast<std::size_t>(s_end - s_begin) + 1;
  const unsigned threads = opt.threads;
  opt.threads = 1;

  std::vector<EncodeSummary> runs(count);
  std::vector<SweepRow> rows(count);
  parallel_for(count, threads, [&](std::size_t i) {
    EncoderOptions o = opt;
    o.s = s_begin + static_cast<int>(i);
    EncodeSummary s;
    s.layers = encode_layers(codable, o);
    s.bitstream = serialize(assemble(s.layers));
    for (const auto& l : s.layers) s.distortion += l.distortion;
    rows[i] = {o.s, s.bitstream.size(), s.distortion};
    runs[i].bitstream = std::move(s.bitstream);
  });

  SweepResult out;
  out.rows = std::move(rows);
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (out.rows[i].compressed_bytes < out.rows[best].compressed_bytes) best = i;
  }
  out.best_s = out.rows[best].s;
  out.best_bitstream = std::move(runs[best].bitstream);
  return out;
}

inline SweepResult cmd_sweep(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                             const EncoderOptions& opt, int s_begin, int s_end, std::ostream& report) {
  if (s_begin < 0 || s_end < s_begin) {
    throw InputError("empty or negative S range " + std::to_string(s_begin) + ":" +
                     std::to_string(s_end));
  }
  const auto file = load(input);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  auto result = sweep_model(file, opt, s_begin, s_end);

  std::ostringstream table;
  table << "s\tcompressed_bytes\tdistortion\n";
  for (const auto& r : result.rows) {
    table << r.s << '\t' << r.compressed_bytes << '\t' << detail::fmt_double(r.distortion) << '\n';
  }
  const std::string text = table.str();
  write_file(out_dir / "sweep.tsv",
             std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  write_file(out_dir / "best.dcnb", result.best_bitstream);

  for (const auto& r : result.rows) {
    report << Record("sweep").add("s", r.s).add("compressed_bytes", r.compressed_bytes).add("distortion", r.distortion);
  }
  const auto& best = result.rows[static_cast<std::size_t>(result.best_s - s_begin)];
  report << Record("best")
                .add("s", result.best_s)
                .add("compressed_bytes", best.compressed_bytes)
                .add("distortion", best.distortion)
                .add("bitstream", (out_dir / "best.dcnb").string());
  return result;
}

}  // namespace nncabac

#endif  // NNCABAC_COMMANDS_HPP_
