// SPDX-License-Identifier: Apache-2.0
#include "hetcal/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "hetcal/errors.hpp"

namespace hetcal {

namespace {

const ordered_json& require_key(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing key: ") + key);
  return *it;
}

double require_number(const ordered_json& j, const char* key) {
  const ordered_json& v = require_key(j, key);
  if (!v.is_number()) throw SchemaError(std::string("key is not a number: ") + key);
  return v.get<double>();
}

std::vector<double> require_array(const ordered_json& j, const char* key) {
  const ordered_json& v = require_key(j, key);
  if (!v.is_array()) throw SchemaError(std::string("key is not an array: ") + key);
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw SchemaError(std::string("non-numeric entry in array: ") + key);
    out.push_back(e.get<double>());
  }
  return out;
}

void check_schema_version(const ordered_json& j) {
  const ordered_json& v = require_key(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kDatasetSchemaVersion) {
    throw SchemaError("schema-version mismatch: expected " +
                      std::to_string(kDatasetSchemaVersion));
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw SchemaError("double formatting failed");
  return std::string(buf, ptr);
}

std::string filter_family_to_string(const EsaConfig& cfg) {
  switch (cfg.filter_family) {
    case FilterFamily::gaussian:
      return "gaussian";
    case FilterFamily::rectangular:
      return "rectangular";
    case FilterFamily::supergaussian:
      return "supergaussian:" + format_double(cfg.supergaussian_order);
  }
  throw SchemaError("unknown filter family");
}

void filter_family_from_string(const std::string& text, EsaConfig& cfg) {
  if (text == "gaussian") {
    cfg.filter_family = FilterFamily::gaussian;
    cfg.supergaussian_order = 1.0;
    return;
  }
  if (text == "rectangular") {
    cfg.filter_family = FilterFamily::rectangular;
    cfg.supergaussian_order = 1.0;
    return;
  }
  const std::string prefix = "supergaussian";
  if (text.rfind(prefix, 0) == 0) {
    cfg.filter_family = FilterFamily::supergaussian;
    cfg.supergaussian_order = 1.0;
    if (text.size() > prefix.size()) {
      if (text[prefix.size()] != ':') {
        throw SchemaError("filter_family: expected supergaussian:<order>, got " + text);
      }
      const char* first = text.data() + prefix.size() + 1;
      const char* last = text.data() + text.size();
      double order = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, order);
      if (ec != std::errc{} || ptr != last || order <= 0.0) {
        throw SchemaError("filter_family: invalid supergaussian order in " + text);
      }
      cfg.supergaussian_order = order;
    }
    return;
  }
  throw SchemaError("filter_family: unknown value " + text);
}

ordered_json dataset_to_json(const Dataset& ds) {
  ordered_json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["esa"] = {
      {"center_hz", ds.esa.center_hz},
      {"span_hz", ds.esa.span_hz},
      {"rbw_hz", ds.esa.rbw_hz},
      {"n_bins", ds.esa.n_bins},
      {"n_avg", ds.esa.n_avg},
      {"filter_family", filter_family_to_string(ds.esa)},
      {"reference_power", ds.esa.reference_power},
  };
  j["freq_hz"] = ds.freq_hz;
  j["trace_electronic_dbmv"] = ds.electronic_dbmv;
  j["trace_shot_dbmv"] = ds.shot_dbmv;
  j["trace_quadrature_dbmv"] = ds.quadrature_dbmv;
  j["monitor"] = {
      {"samples_v", ds.monitor.samples_v},
      {"dark_mean_v", ds.monitor.dark_mean_v},
      {"responsivity_v_per_uw", ds.monitor.responsivity_v_per_uw},
      {"attenuation_l", ds.monitor.attenuation_l},
  };
  j["metadata"] = {
      {"wavelength_m", ds.metadata.wavelength_m},
      {"if_hz", ds.metadata.if_hz},
      {"seed", ds.metadata.seed},
      {"timestamp_iso8601", ds.metadata.timestamp_iso8601},
  };
  if (ds.ground_truth) {
    j["ground_truth"] = {
        {"eta_true", ds.ground_truth->eta_true},
        {"p_alpha_w", ds.ground_truth->p_alpha_w},
    };
  }
  return j;
}

Dataset dataset_from_json(const ordered_json& j) {
  check_schema_version(j);
  Dataset ds;
  const ordered_json& esa = require_key(j, "esa");
  ds.esa.center_hz = require_number(esa, "center_hz");
  ds.esa.span_hz = require_number(esa, "span_hz");
  ds.esa.rbw_hz = require_number(esa, "rbw_hz");
  ds.esa.n_bins = static_cast<int>(require_number(esa, "n_bins"));
  ds.esa.n_avg = static_cast<int>(require_number(esa, "n_avg"));
  const ordered_json& family = require_key(esa, "filter_family");
  if (!family.is_string()) throw SchemaError("esa.filter_family must be a string");
  filter_family_from_string(family.get<std::string>(), ds.esa);
  ds.esa.reference_power = require_number(esa, "reference_power");

  ds.freq_hz = require_array(j, "freq_hz");
  ds.electronic_dbmv = require_array(j, "trace_electronic_dbmv");
  ds.shot_dbmv = require_array(j, "trace_shot_dbmv");
  ds.quadrature_dbmv = require_array(j, "trace_quadrature_dbmv");

  const ordered_json& mon = require_key(j, "monitor");
  ds.monitor.samples_v = require_array(mon, "samples_v");
  ds.monitor.dark_mean_v = require_number(mon, "dark_mean_v");
  ds.monitor.responsivity_v_per_uw = require_number(mon, "responsivity_v_per_uw");
  ds.monitor.attenuation_l = require_number(mon, "attenuation_l");

  const ordered_json& meta = require_key(j, "metadata");
  ds.metadata.wavelength_m = require_number(meta, "wavelength_m");
  ds.metadata.if_hz = require_number(meta, "if_hz");
  const ordered_json& seed = require_key(meta, "seed");
  if (!seed.is_number_integer() && !seed.is_number_unsigned()) {
    throw SchemaError("metadata.seed must be an integer");
  }
  ds.metadata.seed = seed.get<std::uint64_t>();
  const ordered_json& ts = require_key(meta, "timestamp_iso8601");
  if (!ts.is_string()) throw SchemaError("metadata.timestamp_iso8601 must be a string");
  ds.metadata.timestamp_iso8601 = ts.get<std::string>();

  if (auto it = j.find("ground_truth"); it != j.end()) {
    GroundTruth gt;
    gt.eta_true = require_number(*it, "eta_true");
    gt.p_alpha_w = require_number(*it, "p_alpha_w");
    ds.ground_truth = gt;
  }

  validate(ds);
  return ds;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open for writing: " + tmp.string());
    out << text;
    if (!out) throw SchemaError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw SchemaError("rename failed for " + path.string() + ": " + ec.message());
}

ordered_json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open: " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_text_atomic(path, dataset_to_json(ds).dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(parse_json_file(path));
}

ordered_json tone_cal_to_json(const ToneCalRecord& rec) {
  ordered_json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["kind"] = "tone_calibration";
  j["rbw_hz"] = rec.rbw_hz;
  j["reference_power"] = rec.reference_power;
  if (rec.tone_hz) j["tone_hz"] = *rec.tone_hz;
  j["freq_hz"] = rec.trace.freq_hz;
  j["values_dbmv"] = rec.trace.values_dbmv;
  return j;
}

ToneCalRecord tone_cal_from_json(const ordered_json& j) {
  check_schema_version(j);
  const ordered_json& kind = require_key(j, "kind");
  if (!kind.is_string() || kind.get<std::string>() != "tone_calibration") {
    throw SchemaError("expected kind = tone_calibration");
  }
  ToneCalRecord rec;
  rec.rbw_hz = require_number(j, "rbw_hz");
  rec.reference_power = require_number(j, "reference_power");
  if (auto it = j.find("tone_hz"); it != j.end()) rec.tone_hz = it->get<double>();
  rec.trace.freq_hz = require_array(j, "freq_hz");
  rec.trace.values_dbmv = require_array(j, "values_dbmv");
  validate(rec.trace);
  if (rec.rbw_hz <= 0.0) throw SchemaError("tone calibration: rbw_hz must be positive");
  if (rec.reference_power <= 0.0) {
    throw SchemaError("tone calibration: reference_power must be positive");
  }
  return rec;
}

void save_tone_cal(const ToneCalRecord& rec, const std::filesystem::path& path) {
  write_text_atomic(path, tone_cal_to_json(rec).dump(2) + "\n");
}

ToneCalRecord load_tone_cal(const std::filesystem::path& path) {
  return tone_cal_from_json(parse_json_file(path));
}

}  // namespace hetcal
