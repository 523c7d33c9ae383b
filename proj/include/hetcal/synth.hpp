// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcal/esa.hpp"
#include "hetcal/rng.hpp"

// Stochastic realization of averaged ESA sweeps and of the power-monitor
// readout, plus the acquisition record ("dataset") the protocol persists.

namespace hetcal {

/// Expected powers below this are clamped before log conversion so the
/// dBmV traces stay finite.
inline constexpr double kPowerFloor = 1e-30;

struct MonitorModel {
  double responsivity_v_per_uw = 0.5;
  double dark_offset_v = 0.1;
  double readout_noise_std_v = 1e-3;
};

void validate(const MonitorModel& mon);

/// Noise-free trace: the n_avg -> infinity limit of sample_trace.
Trace expected_to_trace(const std::vector<double>& expected_linear, const EsaConfig& cfg);

/// Each averaged bin is expected * G with G a unit-mean gamma variate of
/// shape n_avg (power-averaging statistics), converted to dBmV. The same
/// seed reproduces the trace bit for bit.
Trace sample_trace(const std::vector<double>& expected_linear, const EsaConfig& cfg,
                   Rng& rng);

/// Narrow-tone acquisition used for the ENBW calibration: the filter shape
/// scaled by tone_power on top of a flat noise floor. Pass rng = nullptr
/// for the deterministic limit.
Trace synthesize_tone_cal_trace(const EsaConfig& cfg, double tone_hz, double tone_power,
                                double noise_floor_power, Rng* rng);

/// Monitor voltages R*p + dark (+ gaussian readout noise unless rng is null).
std::vector<double> synthesize_monitor_samples(const MonitorModel& mon, double power_uw,
                                               int count, Rng* rng);

struct MonitorRecord {
  std::vector<double> samples_v;
  double dark_mean_v = 0.0;
  double responsivity_v_per_uw = 0.0;
  double attenuation_l = 1.0;
};

struct DatasetMetadata {
  double wavelength_m = 0.0;
  double if_hz = 0.0;
  std::uint64_t seed = 0;
  std::string timestamp_iso8601;
};

struct GroundTruth {
  double eta_true = 0.0;
  double p_alpha_w = 0.0;
};

/// One protocol acquisition: the three traces on a shared frequency axis,
/// the monitor batch, and the calibration constants needed downstream.
struct Dataset {
  EsaConfig esa;
  std::vector<double> freq_hz;
  std::vector<double> electronic_dbmv;
  std::vector<double> shot_dbmv;
  std::vector<double> quadrature_dbmv;
  MonitorRecord monitor;
  DatasetMetadata metadata;
  std::optional<GroundTruth> ground_truth;
};

void validate(const Dataset& ds);

}  // namespace hetcal
