// SPDX-License-Identifier: Apache-2.0
#include "hetcal/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hetcal/constants.hpp"
#include "hetcal/dataset_io.hpp"
#include "hetcal/errors.hpp"

namespace hetcal {

Scenario example_scenario() {
  Scenario sc;
  sc.rx = {.delta_tau = 0.0,
           .tau_alpha = 0.5,
           .tau_beta = 0.99,
           .eta1 = 0.75,
           .eta2 = 0.75,
           .eta_mm = 0.92,
           .k_conv = 1.0,
           .gain = 1.0,
           .noise_factor = 1.0};
  sc.fields.wavelength_m = 1.542e-6;
  sc.fields.if_hz = 20.0e6;
  sc.fields.photon_flux_signal = 1.0e-8 / photon_energy_j(sc.fields.wavelength_m);
  sc.fields.photon_flux_lo = 1.0e-3 / photon_energy_j(sc.fields.wavelength_m);
  sc.channel = {};
  sc.esa = {.center_hz = 20.0e6,
            .span_hz = 10.0e6,
            .rbw_hz = 1.0e6,
            .n_bins = 2001,
            .n_avg = 100,
            .filter_family = FilterFamily::gaussian,
            .supergaussian_order = 1.0,
            .reference_power = 1.0};
  sc.monitor = {.responsivity_v_per_uw = 0.5, .dark_offset_v = 0.1,
                .readout_noise_std_v = 1e-3};
  sc.s_elec = 3.6e14;
  sc.n_repeats = 10;
  sc.seed = 20260809;
  sc.nd_attenuation_l = 1e-3;
  return sc;
}

namespace cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config document (schema version 1)

struct CliConfig {
  Scenario scenario = example_scenario();
  bool has_scenario = false;

  SweepAxis sweep_axis = SweepAxis::signal_power;
  std::vector<double> sweep_points;
  bool has_sweep = false;

  AnalysisOptions analysis;
  EnbwCalSettings enbw_cal;
  EnbwOptions enbw;

  std::vector<double> budget_components;
  double budget_type_b_rel = 0.0;
  double budget_k = 2.0;
  bool has_budget = false;
};

bool has(const ordered_json& j, const char* key) { return j.find(key) != j.end(); }

double num_at(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw SchemaError(std::string("config: ") + key + " must be a number");
  return v.get<double>();
}

double num_or(const ordered_json& j, const char* key, double def) {
  return has(j, key) ? num_at(j, key) : def;
}

int int_or(const ordered_json& j, const char* key, int def) {
  if (!has(j, key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("config: ") + key + " must be an integer");
  }
  return v.get<int>();
}

bool bool_or(const ordered_json& j, const char* key, bool def) {
  if (!has(j, key)) return def;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw SchemaError(std::string("config: ") + key + " must be a boolean");
  return v.get<bool>();
}

std::string str_or(const ordered_json& j, const char* key, const std::string& def) {
  if (!has(j, key)) return def;
  const auto& v = j.at(key);
  if (!v.is_string()) throw SchemaError(std::string("config: ") + key + " must be a string");
  return v.get<std::string>();
}

void parse_receiver(const ordered_json& j, ReceiverParams& rx) {
  rx.delta_tau = num_or(j, "delta_tau", rx.delta_tau);
  rx.tau_alpha = num_or(j, "tau_alpha", rx.tau_alpha);
  rx.tau_beta = num_or(j, "tau_beta", rx.tau_beta);
  rx.eta1 = num_or(j, "eta1", rx.eta1);
  rx.eta2 = num_or(j, "eta2", rx.eta2);
  rx.eta_mm = num_or(j, "eta_mm", rx.eta_mm);
  rx.k_conv = num_or(j, "k_conv", rx.k_conv);
  rx.gain = num_or(j, "gain", rx.gain);
  rx.noise_factor = num_or(j, "noise_factor", rx.noise_factor);
}

void parse_fields(const ordered_json& j, FieldParams& f) {
  f.wavelength_m = num_or(j, "wavelength_m", f.wavelength_m);
  f.if_hz = num_or(j, "if_hz", f.if_hz);
  if (has(j, "signal_power_w") && has(j, "photon_flux_signal")) {
    throw SchemaError("config: specify either fields.signal_power_w or "
                      "fields.photon_flux_signal, not both");
  }
  if (has(j, "signal_power_w")) {
    f.photon_flux_signal = num_at(j, "signal_power_w") / photon_energy_j(f.wavelength_m);
  } else if (has(j, "photon_flux_signal")) {
    f.photon_flux_signal = num_at(j, "photon_flux_signal");
  }
  if (has(j, "lo_power_w") && has(j, "photon_flux_lo")) {
    throw SchemaError(
        "config: specify either fields.lo_power_w or fields.photon_flux_lo, not both");
  }
  if (has(j, "lo_power_w")) {
    f.photon_flux_lo = num_at(j, "lo_power_w") / photon_energy_j(f.wavelength_m);
  } else if (has(j, "photon_flux_lo")) {
    f.photon_flux_lo = num_at(j, "photon_flux_lo");
  }
}

void parse_esa(const ordered_json& j, EsaConfig& esa) {
  esa.center_hz = num_or(j, "center_hz", esa.center_hz);
  esa.span_hz = num_or(j, "span_hz", esa.span_hz);
  esa.rbw_hz = num_or(j, "rbw_hz", esa.rbw_hz);
  esa.n_bins = int_or(j, "n_bins", esa.n_bins);
  esa.n_avg = int_or(j, "n_avg", esa.n_avg);
  esa.reference_power = num_or(j, "reference_power", esa.reference_power);
  if (has(j, "filter_family")) {
    filter_family_from_string(str_or(j, "filter_family", "gaussian"), esa);
  }
  if (has(j, "supergaussian_order") && has(j, "enbw_ratio_target")) {
    throw SchemaError("config: specify either esa.supergaussian_order or "
                      "esa.enbw_ratio_target, not both");
  }
  if (has(j, "supergaussian_order")) {
    esa.supergaussian_order = num_at(j, "supergaussian_order");
  } else if (has(j, "enbw_ratio_target")) {
    esa.supergaussian_order =
        supergaussian_order_for_enbw_ratio(num_at(j, "enbw_ratio_target"));
  }
}

void parse_monitor(const ordered_json& j, MonitorModel& mon) {
  mon.responsivity_v_per_uw = num_or(j, "responsivity_v_per_uw", mon.responsivity_v_per_uw);
  mon.dark_offset_v = num_or(j, "dark_offset_v", mon.dark_offset_v);
  mon.readout_noise_std_v = num_or(j, "readout_noise_std_v", mon.readout_noise_std_v);
}

void parse_scenario(const ordered_json& j, Scenario& sc) {
  if (has(j, "receiver")) parse_receiver(j.at("receiver"), sc.rx);
  if (has(j, "fields")) parse_fields(j.at("fields"), sc.fields);
  if (has(j, "channel")) {
    const auto& ch = j.at("channel");
    if (has(ch, "transmissions")) {
      sc.channel.transmissions = ch.at("transmissions").get<std::vector<double>>();
    }
  }
  if (has(j, "esa")) parse_esa(j.at("esa"), sc.esa);
  if (has(j, "monitor")) parse_monitor(j.at("monitor"), sc.monitor);
  sc.s_elec = num_or(j, "s_elec", sc.s_elec);
  sc.n_repeats = int_or(j, "n_repeats", sc.n_repeats);
  if (has(j, "seed")) sc.seed = j.at("seed").get<std::uint64_t>();
  sc.deterministic = bool_or(j, "deterministic", sc.deterministic);
  sc.monitor_sample_count = int_or(j, "monitor_sample_count", sc.monitor_sample_count);
  sc.dark_sample_count = int_or(j, "dark_sample_count", sc.dark_sample_count);
  sc.max_flux_ratio = num_or(j, "max_flux_ratio", sc.max_flux_ratio);
  sc.nd_attenuation_l = num_or(j, "nd_attenuation_l", sc.nd_attenuation_l);
  sc.timestamp_iso8601 = str_or(j, "timestamp_iso8601", sc.timestamp_iso8601);
}

SweepAxis axis_from_string(const std::string& s) {
  if (s == "signal_power") return SweepAxis::signal_power;
  if (s == "attenuation") return SweepAxis::attenuation;
  if (s == "if_frequency") return SweepAxis::if_frequency;
  throw SchemaError("config: sweep.axis must be signal_power, attenuation or if_frequency");
}

std::string axis_to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::signal_power: return "signal_power";
    case SweepAxis::attenuation: return "attenuation";
    case SweepAxis::if_frequency: return "if_frequency";
  }
  return "unknown";
}

CliConfig load_config(const std::string& path) {
  const ordered_json j = parse_json_file(path);
  if (!has(j, "version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 1) {
    throw SchemaError("config: missing or unsupported version (expected 1)");
  }
  CliConfig cfg;
  if (has(j, "scenario")) {
    cfg.has_scenario = true;
    parse_scenario(j.at("scenario"), cfg.scenario);
    validate(cfg.scenario);
  }
  if (has(j, "sweep")) {
    const auto& sw = j.at("sweep");
    cfg.has_sweep = true;
    cfg.sweep_axis = axis_from_string(str_or(sw, "axis", "signal_power"));
    if (!has(sw, "points")) throw SchemaError("config: sweep.points is required");
    cfg.sweep_points = sw.at("points").get<std::vector<double>>();
  }
  if (has(j, "analysis")) {
    const auto& an = j.at("analysis");
    cfg.analysis.k = num_or(an, "k", cfg.analysis.k);
    cfg.analysis.type_b_rel = num_or(an, "type_b_rel", cfg.analysis.type_b_rel);
    cfg.analysis.rel_u_attenuation =
        num_or(an, "rel_u_attenuation", cfg.analysis.rel_u_attenuation);
    cfg.analysis.rel_u_responsivity =
        num_or(an, "rel_u_responsivity", cfg.analysis.rel_u_responsivity);
    if (has(an, "tone_halfwidth_hz")) {
      cfg.analysis.ratio.tone_halfwidth_hz = num_at(an, "tone_halfwidth_hz");
    }
    cfg.analysis.ratio.min_snr = num_or(an, "min_snr", cfg.analysis.ratio.min_snr);
    cfg.enbw.type_b_rel = num_or(an, "enbw_type_b_rel", cfg.enbw.type_b_rel);
  }
  if (has(j, "enbw_cal")) {
    const auto& ec = j.at("enbw_cal");
    cfg.enbw_cal.n_bins = int_or(ec, "n_bins", cfg.enbw_cal.n_bins);
    cfg.enbw_cal.tone_power = num_or(ec, "tone_power", cfg.enbw_cal.tone_power);
    cfg.enbw_cal.noise_floor_power =
        num_or(ec, "noise_floor_power", cfg.enbw_cal.noise_floor_power);
    cfg.enbw_cal.sampled = bool_or(ec, "sampled", cfg.enbw_cal.sampled);
    cfg.enbw_cal.repeats = int_or(ec, "repeats", cfg.enbw_cal.repeats);
  }
  if (has(j, "budget")) {
    const auto& b = j.at("budget");
    cfg.has_budget = true;
    if (!has(b, "components")) throw SchemaError("config: budget.components is required");
    cfg.budget_components = b.at("components").get<std::vector<double>>();
    cfg.budget_type_b_rel = num_or(b, "type_b_rel", 0.0);
    cfg.budget_k = num_or(b, "k", 2.0);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Report serialization

ordered_json estimate_to_json(const EfficiencyEstimate& est) {
  return ordered_json{
      {"eta", est.eta.value},
      {"u_std", est.eta.u_std},
      {"expanded_u", est.expanded_u},
      {"k", est.k},
      {"x_ratio", est.x_ratio},
      {"p_alpha_w", est.p_alpha_w},
      {"enbw_hz", est.enbw_hz},
      {"budget",
       {{"rel_p_alpha", est.budget.rel_p_alpha},
        {"rel_enbw", est.budget.rel_enbw},
        {"rel_x", est.budget.rel_x},
        {"rel_type_b", est.budget.rel_type_b}}},
  };
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string csv = "axis_value,eta,u_std,expanded_u_k2,eta_true,e_n\n";
  for (const SweepPoint& p : report.points) {
    csv += format_double(p.axis_value) + ",";
    csv += format_double(p.estimate.eta.value) + ",";
    csv += format_double(p.estimate.eta.u_std) + ",";
    csv += format_double(p.estimate.eta.expanded(2.0)) + ",";
    csv += format_double(p.eta_true) + ",";
    csv += format_double(p.e_n) + "\n";
  }
  return csv;
}

ordered_json sweep_to_json(const SweepReport& report) {
  ordered_json points = ordered_json::array();
  for (const SweepPoint& p : report.points) {
    ordered_json row{
        {"axis_value", p.axis_value},
        {"eta", p.estimate.eta.value},
        {"u_std", p.estimate.eta.u_std},
        {"expanded_u_k2", p.estimate.eta.expanded(2.0)},
        {"eta_true", p.eta_true},
        {"e_n", p.e_n},
        {"budget",
         {{"rel_p_alpha", p.estimate.budget.rel_p_alpha},
          {"rel_enbw", p.estimate.budget.rel_enbw},
          {"rel_x", p.estimate.budget.rel_x},
          {"rel_type_b", p.estimate.budget.rel_type_b}}},
    };
    points.push_back(std::move(row));
  }
  ordered_json j{{"axis", axis_to_string(report.axis)},
                 {"points", std::move(points)},
                 {"mean_eta", report.mean_eta}};
  if (report.loglog_fit) {
    j["loglog_fit"] = {{"slope", report.loglog_fit->slope},
                       {"slope_u", report.loglog_fit->slope_u},
                       {"intercept", report.loglog_fit->intercept}};
  }
  return j;
}

void print_estimate(std::ostream& out, const EfficiencyEstimate& est) {
  out << "eta = " << fmt("%.6f", est.eta.value) << " +/- " << fmt("%.6f", est.eta.u_std)
      << " (u, k=1); expanded U(k=" << fmt("%.3g", est.k) << ") = "
      << fmt("%.6f", est.expanded_u) << "\n";
  out << "X = " << fmt("%.6g", est.x_ratio) << ", P_alpha = " << fmt("%.6g", est.p_alpha_w)
      << " W, ENBW = " << fmt("%.6g", est.enbw_hz) << " Hz\n";
  out << "budget (relative): P_alpha " << fmt("%.4f", 100.0 * est.budget.rel_p_alpha)
      << " %, ENBW " << fmt("%.4f", 100.0 * est.budget.rel_enbw) << " %, X "
      << fmt("%.4f", 100.0 * est.budget.rel_x) << " %, type B "
      << fmt("%.4f", 100.0 * est.budget.rel_type_b) << " %\n";
}

// ---------------------------------------------------------------------------
// Subcommand handlers

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  bool deterministic = false;
  std::optional<double> k;
  std::string out_dir;
};

void apply_overrides(const CommonFlags& flags, CliConfig& cfg) {
  if (flags.seed) cfg.scenario.seed = *flags.seed;
  if (flags.repeats) cfg.scenario.n_repeats = *flags.repeats;
  if (flags.deterministic) cfg.scenario.deterministic = true;
  if (flags.k) cfg.analysis.k = *flags.k;
  if (cfg.has_scenario || flags.seed || flags.repeats || flags.deterministic) {
    validate(cfg.scenario);
  }
}

CliConfig require_config(const CommonFlags& flags, bool need_scenario) {
  if (flags.config_path.empty()) throw SchemaError("a --config file is required");
  CliConfig cfg = load_config(flags.config_path);
  if (need_scenario && !cfg.has_scenario) {
    throw SchemaError("config: scenario section required for this subcommand");
  }
  return cfg;
}

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(p);
  return p;
}

int run_simulate(const CommonFlags& flags, std::ostream& out) {
  CliConfig cfg = require_config(flags, true);
  apply_overrides(flags, cfg);
  const fs::path dir = ensure_out_dir(flags.out_dir);

  const std::vector<Dataset> datasets = run_protocol(cfg.scenario);
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "dataset_%03zu.json", i);
    save_dataset(datasets[i], dir / name);
    out << (dir / name).string() << "\n";
  }

  EsaConfig cal_cfg = cfg.scenario.esa;
  cal_cfg.n_bins = cfg.enbw_cal.n_bins;
  const int cal_count = cfg.enbw_cal.sampled && !cfg.scenario.deterministic
                            ? cfg.enbw_cal.repeats
                            : 1;
  for (int r = 0; r < cal_count; ++r) {
    ToneCalRecord rec;
    if (cfg.enbw_cal.sampled && !cfg.scenario.deterministic) {
      Rng rng(derive_seed(cfg.scenario.seed, {0, static_cast<std::uint64_t>(r), 5}));
      rec.trace = synthesize_tone_cal_trace(cal_cfg, cal_cfg.center_hz,
                                            cfg.enbw_cal.tone_power,
                                            cfg.enbw_cal.noise_floor_power, &rng);
    } else {
      rec.trace = synthesize_tone_cal_trace(cal_cfg, cal_cfg.center_hz,
                                            cfg.enbw_cal.tone_power,
                         cfg.enbw_cal.noise_floor_power, nullptr);
    }
    rec.rbw_hz = cal_cfg.rbw_hz;
    rec.reference_power = cal_cfg.reference_power;
    rec.tone_hz = cal_cfg.center_hz;
    char name[32];
    if (cal_count > 1) {
      std::snprintf(name, sizeof(name), "tonecal_%03d.json", r);
    } else {
      std::snprintf(name, sizeof(name), "tonecal.json");
    }
    save_tone_cal(rec, dir / name);
    out << (dir / name).string() << "\n";
  }
  return 0;
}

EnbwResult enbw_from_files(const std::vector<std::string>& files, const EnbwOptions& opts) {
  std::vector<Trace> traces;
  traces.reserve(files.size());
  double rbw = 0.0;
  EnbwOptions local = opts;
  for (const std::string& f : files) {
    ToneCalRecord rec = load_tone_cal(f);
    if (rbw == 0.0) {
      rbw = rec.rbw_hz;
    } else if (rec.rbw_hz != rbw) {
      throw SchemaError("tone calibration files disagree on rbw_hz");
    }
    if (rec.tone_hz && !local.tone_hz) local.tone_hz = *rec.tone_hz;
    traces.push_back(std::move(rec.trace));
  }
  return compute_enbw(traces, rbw, local);
}

int run_enbw(const std::vector<std::string>& files, const CommonFlags& flags,
             std::ostream& out) {
  EnbwOptions opts;
  if (!flags.config_path.empty()) opts = load_config(flags.config_path).enbw;
  const EnbwResult res = enbw_from_files(files, opts);
  out << "ENBW = " << fmt("%.6f", res.enbw_hz.value * 1e-6) << " MHz (ratio "
      << fmt("%.4f", res.ratio) << ", u_rel " << fmt("%.4f", 100.0 * res.enbw_hz.relative())
      << " %)\n";
  if (!flags.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(flags.out_dir);
    ordered_json j{{"enbw_hz", res.enbw_hz.value},
                   {"u_std", res.enbw_hz.u_std},
                   {"ratio", res.ratio},
                   {"rbw_hz", res.rbw_hz},
                   {"kind", res.enbw_hz.kind == UncKind::type_a ? "typeA" : "typeB"}};
    write_text_atomic(dir / "enbw.json", j.dump(2) + "\n");
    out << (dir / "enbw.json").string() << "\n";
  }
  return 0;
}

int run_estimate(const std::vector<std::string>& dataset_files,
                 const std::vector<std::string>& tonecal_files, const CommonFlags& flags,
                 std::ostream& out) {
  CliConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  if (flags.k) cfg.analysis.k = *flags.k;

  std::vector<Dataset> datasets;
  datasets.reserve(dataset_files.size());
  for (const std::string& f : dataset_files) datasets.push_back(load_dataset(f));

  EnbwResult enbw;
  if (!tonecal_files.empty()) {
    enbw = enbw_from_files(tonecal_files, cfg.enbw);
  } else {
    // No calibration trace supplied: fall back to the analytic ENBW of the
    // recorded filter family with the Type-B default.
    const EsaConfig& esa = datasets.front().esa;
    const double b = analytic_enbw(esa);
    enbw.enbw_hz = {b, cfg.enbw.type_b_rel * b, UncKind::type_b};
    enbw.rbw_hz = esa.rbw_hz;
    enbw.ratio = b / esa.rbw_hz;
  }

  const EfficiencyEstimate est = analyze_datasets(datasets, enbw, cfg.analysis);
  print_estimate(out, est);
  if (!flags.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(flags.out_dir);
    write_text_atomic(dir / "estimate.json", estimate_to_json(est).dump(2) + "\n");
    out << (dir / "estimate.json").string() << "\n";
  }
  return 0;
}

int run_validate(const CommonFlags& flags, std::ostream& out) {
  CliConfig cfg = require_config(flags, true);
  apply_overrides(flags, cfg);
  RunOptions opts{cfg.analysis, cfg.enbw_cal, cfg.enbw};
  const ValidationReport report = run_validation(cfg.scenario, opts);

  print_estimate(out, report.estimate);
  out << "eta_true = " << fmt("%.6f", report.eta_true) << ", relative error = "
      << fmt("%.3e", report.rel_error) << ", E_n = " << fmt("%.4f", report.e_n)
      << (report.agree ? " (agreement)" : " (disagreement)") << "\n";

  if (!flags.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(flags.out_dir);
    ordered_json j{{"estimate", estimate_to_json(report.estimate)},
                   {"eta_true", report.eta_true},
                   {"rel_error", report.rel_error},
                   {"e_n", report.e_n},
                   {"agree", report.agree}};
    write_text_atomic(dir / "validate.json", j.dump(2) + "\n");
    out << (dir / "validate.json").string() << "\n";
  }
  return 0;
}

int run_sweep(const CommonFlags& flags, std::ostream& out) {
  CliConfig cfg = require_config(flags, true);
  apply_overrides(flags, cfg);
  if (!cfg.has_sweep) throw SchemaError("config: sweep section required for this subcommand");

  SweepSpec spec{cfg.sweep_axis, cfg.sweep_points, cfg.scenario};
  RunOptions opts{cfg.analysis, cfg.enbw_cal, cfg.enbw};
  const SweepReport report = run_sweep(spec, opts);

  out << "axis_value        eta        u_std      eta_true   E_n\n";
  for (const SweepPoint& p : report.points) {
    out << fmt("%-17.6g", p.axis_value) << " " << fmt("%-10.6f", p.estimate.eta.value)
        << " " << fmt("%-10.6f", p.estimate.eta.u_std) << " "
        << fmt("%-10.6f", p.eta_true) << " " << fmt("%.4f", p.e_n) << "\n";
  }
  out << "mean eta = " << fmt("%.6f", report.mean_eta) << "\n";
  if (report.loglog_fit) {
    out << "log-log slope = " << fmt("%.4f", report.loglog_fit->slope) << " +/- "
        << fmt("%.4f", report.loglog_fit->slope_u) << "\n";
  }

  const fs::path dir = ensure_out_dir(flags.out_dir);
  write_text_atomic(dir / "sweep.csv", sweep_to_csv(report));
  write_text_atomic(dir / "sweep.json", sweep_to_json(report).dump(2) + "\n");
  out << (dir / "sweep.csv").string() << "\n" << (dir / "sweep.json").string() << "\n";
  return 0;
}

int run_budget(const CommonFlags& flags, std::ostream& out) {
  CliConfig cfg = require_config(flags, false);
  if (!cfg.has_budget) throw SchemaError("config: budget section required for this subcommand");
  const double k = flags.k.value_or(cfg.budget_k);

  const double combined = propagate_relative(cfg.budget_components);
  std::vector<double> with_b = cfg.budget_components;
  with_b.push_back(cfg.budget_type_b_rel);
  const double combined_b = propagate_relative(with_b);

  for (std::size_t i = 0; i < cfg.budget_components.size(); ++i) {
    out << "component " << (i + 1) << ": "
        << fmt("%.6f", 100.0 * cfg.budget_components[i]) << " %\n";
  }
  out << "combined (k=1): " << fmt("%.6f", 100.0 * combined) << " %\n";
  out << "type B: " << fmt("%.6f", 100.0 * cfg.budget_type_b_rel) << " %\n";
  out << "combined with type B (k=1): " << fmt("%.6f", 100.0 * combined_b) << " %\n";
  out << "expanded (k=" << fmt("%.3g", k) << "): " << fmt("%.6f", 100.0 * k * combined_b)
      << " %\n";

  if (!flags.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(flags.out_dir);
    ordered_json j{{"components", cfg.budget_components},
                   {"combined_rel", combined},
                   {"type_b_rel", cfg.budget_type_b_rel},
                   {"combined_rel_with_type_b", combined_b},
                   {"k", k},
                   {"expanded_rel", k * combined_b}};
    write_text_atomic(dir / "budget.json", j.dump(2) + "\n");
    out << (dir / "budget.json").string() << "\n";
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shot-noise-referenced calibration of balanced heterodyne receiver "
               "efficiency: simulator, estimator and uncertainty budget"};
  app.name("hetcal");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_help_all_flag("--help-all", "Print help for all subcommands");

  CommonFlags sim_flags, enbw_flags, est_flags, val_flags, sweep_flags, budget_flags;
  sim_flags.out_dir = ".";
  sweep_flags.out_dir = ".";
  std::vector<std::string> enbw_files, dataset_files, tonecal_files;

  auto add_common = [](CLI::App* sub, CommonFlags& flags, bool with_run_flags) {
    sub->add_option("--config", flags.config_path, "JSON configuration file");
    sub->add_option("--out", flags.out_dir, "Output directory for report files");
    if (with_run_flags) {
      sub->add_option("--seed", flags.seed, "Override the scenario seed");
      sub->add_option("--repeats", flags.repeats, "Override acquisitions per point");
      sub->add_flag("--deterministic", flags.deterministic,
                    "Noise-free expectation mode");
    }
    sub->add_option("--k", flags.k, "Coverage factor for expanded uncertainties");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Run the acquisition protocol and write "
                                                 "dataset + tone-calibration files");
  add_common(sim, sim_flags, true);

  CLI::App* enbw = app.add_subcommand("enbw", "Equivalent noise bandwidth from tone-"
                                              "calibration trace files");
  enbw->add_option("files", enbw_files, "Tone-calibration JSON files")->required();
  add_common(enbw, enbw_flags, false);

  CLI::App* est = app.add_subcommand("estimate", "Efficiency estimate with uncertainty "
                                                 "budget from dataset files");
  est->add_option("files", dataset_files, "Dataset JSON files (repeated acquisitions)")
      ->required();
  est->add_option("--tonecal", tonecal_files, "Tone-calibration files for the ENBW");
  add_common(est, est_flags, false);

  CLI::App* val = app.add_subcommand("validate", "Simulate, estimate and compare against "
                                                 "the ground-truth efficiency");
  add_common(val, val_flags, true);

  CLI::App* sweep = app.add_subcommand("sweep", "Signal-power / attenuation / IF sweep "
                                                "with per-point comparison");
  add_common(sweep, sweep_flags, true);

  CLI::App* budget = app.add_subcommand("budget", "Combine relative uncertainty "
                                                  "components in quadrature");
  add_common(budget, budget_flags, false);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("hetcal");
  for (const std::string& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(sim_flags, out);
    if (app.got_subcommand(enbw)) return run_enbw(enbw_files, enbw_flags, out);
    if (app.got_subcommand(est)) {
      return run_estimate(dataset_files, tonecal_files, est_flags, out);
    }
    if (app.got_subcommand(val)) return run_validate(val_flags, out);
    if (app.got_subcommand(sweep)) return run_sweep(sweep_flags, out);
    if (app.got_subcommand(budget)) return run_budget(budget_flags, out);
  } catch (const AnalysisError& e) {
    err << "analysis error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace cli
}  // namespace hetcal
