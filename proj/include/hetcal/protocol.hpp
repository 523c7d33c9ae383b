// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcal/analysis.hpp"
#include "hetcal/synth.hpp"

// Orchestrates the acquisition sequence over the simulated receiver
// (electronic reference, LO-only shot reference, signal+LO beat trace,
// synchronous power monitoring), and runs the validation sweeps.

namespace hetcal {

struct Scenario {
  ReceiverParams rx;
  FieldParams fields;  ///< signal flux is referred to the calibrated reference plane
  ChannelParams channel;
  EsaConfig esa;
  MonitorModel monitor;
  double s_elec = 0.0;  ///< electronic noise density, output units^2 per Hz
  int n_repeats = 10;
  std::uint64_t seed = 1;
  bool deterministic = false;  ///< noise-free expectation mode
  int monitor_sample_count = 100;
  int dark_sample_count = 100;
  double max_flux_ratio = 1e-3;
  /// Fixed ND transmission between the monitor tap and the reference plane.
  double nd_attenuation_l = 1e-3;
  std::string timestamp_iso8601 = "2025-01-01T00:00:00Z";
};

void validate(const Scenario& sc);

/// Signal power at the calibrated reference plane, watts.
double reference_power_w(const Scenario& sc);

/// Efficiency the estimator should recover: lumped receiver efficiency
/// times the channel transmission product.
double effective_efficiency(const Scenario& sc);

/// One acquisition. Sub-streams (traces, dark batch, monitor batch) are
/// seeded from (seed, point_index, repeat_index, stream id), so repeats and
/// sweep points are independent yet reproducible.
Dataset run_acquisition(const Scenario& sc, std::uint64_t point_index,
                        std::uint64_t repeat_index);

/// n_repeats acquisitions with distinct derived seeds.
std::vector<Dataset> run_protocol(const Scenario& sc, std::uint64_t point_index = 0);

struct EnbwCalSettings {
  int n_bins = 16001;  ///< denser grid than the protocol traces
  double tone_power = 1.0;
  double noise_floor_power = 1e-12;
  bool sampled = false;  ///< default: characterized once, noise-free
  int repeats = 1;
};

/// ENBW characterization for the scenario's analyzer settings, from
/// synthesized narrow-tone traces at the span center.
EnbwResult calibrate_enbw(const Scenario& sc, const EnbwCalSettings& settings,
                          const EnbwOptions& opts, std::uint64_t point_index = 0);

struct RunOptions {
  AnalysisOptions analysis;
  EnbwCalSettings enbw_cal;
  EnbwOptions enbw;
};

struct ValidationReport {
  EfficiencyEstimate estimate;
  double eta_true = 0.0;
  double rel_error = 0.0;
  double e_n = 0.0;  ///< against the exact truth, expanded at k = 2
  bool agree = false;
};

ValidationReport run_validation(const Scenario& sc, const RunOptions& opts = {});

enum class SweepAxis { signal_power, attenuation, if_frequency };

struct SweepSpec {
  SweepAxis axis = SweepAxis::signal_power;
  std::vector<double> points;
  Scenario base;
};

void validate(const SweepSpec& spec);

/// The base scenario moved to one sweep point (signal power in watts,
/// channel transmission, or IF = analyzer center frequency in Hz).
Scenario scenario_at(const SweepSpec& spec, double point);

struct SweepPoint {
  double axis_value = 0.0;
  EfficiencyEstimate estimate;
  double eta_true = 0.0;
  double e_n = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double slope_u = 0.0;
  double intercept = 0.0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::signal_power;
  std::vector<SweepPoint> points;
  double mean_eta = 0.0;
  /// log10(eta) vs log10(T) weighted fit; attenuation axis only.
  std::optional<SlopeFit> loglog_fit;
};

SweepReport run_sweep(const SweepSpec& spec, const RunOptions& opts = {});

}  // namespace hetcal
