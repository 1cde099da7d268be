// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ahdr/data_synth.hpp"

namespace ahdr {

/// "sample_0007" style identifiers.
std::string sample_id(std::size_t index);

/// Directory layout:
///   manifest                 "ahdr-dataset 1", "count N", then one line per
///                            sample: "<id> seed=<u64> biases=<b0>,<b1>,<b2>"
///   <id>/ldr_0.ppm .. ldr_2.ppm   exposures, ascending
///   <id>/gt.pfm                   ground truth aligned with ldr_1
///   <id>/exposure.txt             one bias per line
void write_dataset(const std::filesystem::path& dir, const std::vector<SampleTriplet>& samples,
                   const std::vector<std::uint64_t>& seeds, int ppm_bits = 8);

std::vector<SampleTriplet> load_dataset(const std::filesystem::path& dir);

/// Parses "-2,0,2" into three ascending integer biases. The middle one is
/// the reference and must be 0 so that its exposure time is 1.
std::array<int, 3> parse_biases(const std::string& text);

}  // namespace ahdr
