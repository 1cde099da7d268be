// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "ahdr/file_util.hpp"
#include "ahdr/image_io.hpp"

namespace ahdr {
namespace fs = std::filesystem;

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%04zu", index);
  return buf;
}

std::array<int, 3> parse_biases(const std::string& text) {
  std::array<int, 3> out{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item(text.data() + start, comma - start);
    int v = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw ConfigError("bad exposure bias '" + std::string(item) + "' in '" + text + "'");
    }
    if (count == 3) throw ConfigError("expected exactly three biases in '" + text + "'");
    out[count++] = v;
    start = comma + 1;
  }
  if (count != 3) throw ConfigError("expected exactly three biases in '" + text + "'");
  if (!std::is_sorted(out.begin(), out.end()) || out[0] == out[1] || out[1] == out[2]) {
    throw ConfigError("biases must be strictly ascending: '" + text + "'");
  }
  if (out[1] != 0) throw ConfigError("the reference (middle) bias must be 0: '" + text + "'");
  return out;
}

void write_dataset(const fs::path& dir, const std::vector<SampleTriplet>& samples,
                   const std::vector<std::uint64_t>& seeds, int ppm_bits) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());
  std::ostringstream manifest;
  manifest << "ahdr-dataset 1\ncount " << samples.size() << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleTriplet& s = samples[i];
    const std::string id = s.id.empty() ? sample_id(i) : s.id;
    const fs::path sub = dir / id;
    fs::create_directories(sub, ec);
    if (ec) throw DataError(sub.string() + ": cannot create directory: " + ec.message());
    std::string exposure;
    for (std::size_t f = 0; f < 3; ++f) {
      write_ppm(sub / ("ldr_" + std::to_string(f) + ".ppm"), s.ldrs[f].ldr, ppm_bits);
      exposure += std::to_string(s.ldrs[f].bias) + "\n";
    }
    write_pfm(sub / "gt.pfm", s.gt.radiance);
    write_file_atomic(sub / "exposure.txt", exposure);
    manifest << id << " seed=" << (i < seeds.size() ? seeds[i] : 0) << " biases=" << s.ldrs[0].bias << ","
             << s.ldrs[1].bias << "," << s.ldrs[2].bias << "\n";
  }
  write_file_atomic(dir / "manifest", manifest.str());
}

std::vector<SampleTriplet> load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest";
  std::istringstream in(read_file(manifest_path));
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw DataError(manifest_path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line) || (++line_no, line != "ahdr-dataset 1")) fail("expected header 'ahdr-dataset 1'");
  std::size_t count = 0;
  {
    ++line_no;
    if (!std::getline(in, line) || line.rfind("count ", 0) != 0) fail("expected 'count N'");
    const std::string n = line.substr(6);
    const auto [end, ec] = std::from_chars(n.data(), n.data() + n.size(), count);
    if (ec != std::errc() || end != n.data() + n.size()) fail("bad sample count '" + n + "'");
  }
  std::vector<SampleTriplet> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, seed_field, bias_field;
    fields >> id >> seed_field >> bias_field;
    if (id.empty() || bias_field.rfind("biases=", 0) != 0) fail("malformed sample entry '" + line + "'");
    std::array<int, 3> biases{};
    try {
      biases = parse_biases(bias_field.substr(7));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
    const fs::path sub = dir / id;
    SampleTriplet s;
    s.id = id;
    std::istringstream exposure(read_file(sub / "exposure.txt"));
    for (std::size_t f = 0; f < 3; ++f) {
      int b = 0;
      if (!(exposure >> b)) throw DataError((sub / "exposure.txt").string() + ": expected three integer biases");
      if (b != biases[f]) throw DataError((sub / "exposure.txt").string() + ": biases disagree with manifest");
      s.ldrs[f] = ExposureImage::from_bias(read_ppm(sub / ("ldr_" + std::to_string(f) + ".ppm")).pixels, b);
    }
    s.gt.radiance = read_pfm(sub / "gt.pfm");
    for (std::size_t f = 0; f < 3; ++f) {
      if (s.ldrs[f].ldr.shape() != s.gt.radiance.shape()) {
        throw DataError(sub.string() + ": ldr_" + std::to_string(f) + " is " + s.ldrs[f].ldr.shape().str() +
                        " but gt is " + s.gt.radiance.shape().str());
      }
    }
    samples.push_back(std::move(s));
  }
  if (samples.size() != count) {
    throw DataError(manifest_path.string() + ": manifest declares " + std::to_string(count) + " samples but lists " +
                    std::to_string(samples.size()));
  }
  return samples;
}

}  // namespace ahdr
