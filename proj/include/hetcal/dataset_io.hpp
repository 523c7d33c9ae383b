// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hetcal/synth.hpp"

// JSON persistence: one self-contained UTF-8 document per acquisition, plus
// the tone-calibration trace file consumed by the ENBW computation. Doubles
// are emitted in shortest round-trip form, so load(save(x)) is bit-exact.

namespace hetcal {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kDatasetSchemaVersion = 1;

ordered_json dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const ordered_json& j);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct ToneCalRecord {
  Trace trace;
  double rbw_hz = 0.0;
  double reference_power = 1.0;
  std::optional<double> tone_hz;
};

ordered_json tone_cal_to_json(const ToneCalRecord& rec);
ToneCalRecord tone_cal_from_json(const ordered_json& j);
void save_tone_cal(const ToneCalRecord& rec, const std::filesystem::path& path);
ToneCalRecord load_tone_cal(const std::filesystem::path& path);

std::string filter_family_to_string(const EsaConfig& cfg);
void filter_family_from_string(const std::string& text, EsaConfig& cfg);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Write-to-temp-then-rename so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

ordered_json parse_json_file(const std::filesystem::path& path);

}  // namespace hetcal
