// SPDX-License-Identifier: Apache-2.0
#include "hetcal/synth.hpp"

#include <cmath>

#include "hetcal/errors.hpp"
#include "hetcal/kernels.hpp"

namespace hetcal {

void validate(const MonitorModel& mon) {
  if (mon.responsivity_v_per_uw <= 0.0) {
    throw InvariantError("monitor.responsivity_v_per_uw must be positive");
  }
  if (mon.readout_noise_std_v < 0.0) {
    throw InvariantError("monitor.readout_noise_std_v must be >= 0");
  }
}

Trace expected_to_trace(const std::vector<double>& expected_linear, const EsaConfig& cfg) {
  Trace trace;
  trace.freq_hz = frequency_axis(cfg);
  trace.values_dbmv.resize(expected_linear.size());
  kernels::dbmv_from_linear(expected_linear, cfg.reference_power, kPowerFloor,
                            trace.values_dbmv);
  return trace;
}

Trace sample_trace(const std::vector<double>& expected_linear, const EsaConfig& cfg,
                   Rng& rng) {
  std::vector<double> realized(expected_linear.size());
  for (std::size_t i = 0; i < realized.size(); ++i) {
    realized[i] = expected_linear[i] * rng.gamma_unit_mean(cfg.n_avg);
  }
  Trace trace;
  trace.freq_hz = frequency_axis(cfg);
  trace.values_dbmv.resize(realized.size());
  kernels::dbmv_from_linear(realized, cfg.reference_power, kPowerFloor, trace.values_dbmv);
  return trace;
}

Trace synthesize_tone_cal_trace(const EsaConfig& cfg, double tone_hz, double tone_power,
                                double noise_floor_power, Rng* rng) {
  validate(cfg);
  if (tone_power <= 0.0) throw InvariantError("tone_power must be positive");
  if (noise_floor_power < 0.0) throw InvariantError("noise_floor_power must be >= 0");
  if (std::abs(tone_hz - cfg.center_hz) >= 0.5 * cfg.span_hz) {
    throw InvariantError("tone_hz lies outside the esa span (esa.center_hz/esa.span_hz)");
  }
  const std::vector<double> freq = frequency_axis(cfg);
  std::vector<double> expected(freq.size(), noise_floor_power);
  std::vector<double> shape(freq.size());
  filter_power_response(cfg, freq, tone_hz, shape);
  kernels::add_scaled(expected, shape, tone_power, expected);
  return rng ? sample_trace(expected, cfg, *rng) : expected_to_trace(expected, cfg);
}

std::vector<double> synthesize_monitor_samples(const MonitorModel& mon, double power_uw,
                                               int count, Rng* rng) {
  validate(mon);
  if (count < 1) throw InvariantError("monitor sample count must be >= 1");
  if (power_uw < 0.0) throw InvariantError("monitor power must be >= 0");
  std::vector<double> samples(static_cast<std::size_t>(count));
  const double mean_v = mon.responsivity_v_per_uw * power_uw + mon.dark_offset_v;
  for (double& s : samples) {
    s = mean_v;
    if (rng && mon.readout_noise_std_v > 0.0) {
      s += mon.readout_noise_std_v * rng->normal();
    }
  }
  return samples;
}

void validate(const Dataset& ds) {
  validate(ds.esa);
  const std::size_t n = ds.freq_hz.size();
  if (n != static_cast<std::size_t>(ds.esa.n_bins)) {
    throw SchemaError("dataset: freq_hz length does not match esa.n_bins");
  }
  if (ds.electronic_dbmv.size() != n || ds.shot_dbmv.size() != n ||
      ds.quadrature_dbmv.size() != n) {
    throw SchemaError("dataset: all traces must share the frequency axis length");
  }
  Trace probe{ds.freq_hz, ds.electronic_dbmv};
  validate(probe);  // uniform ascending axis
  if (ds.monitor.samples_v.empty()) throw SchemaError("dataset: monitor.samples_v is empty");
  if (ds.monitor.responsivity_v_per_uw <= 0.0) {
    throw SchemaError("dataset: monitor.responsivity_v_per_uw must be positive");
  }
  if (ds.monitor.attenuation_l <= 0.0 || ds.monitor.attenuation_l > 1.0) {
    throw SchemaError("dataset: monitor.attenuation_l must be in (0, 1]");
  }
  if (ds.metadata.wavelength_m <= 0.0) {
    throw SchemaError("dataset: metadata.wavelength_m must be positive");
  }
  if (ds.metadata.if_hz <= 0.0) throw SchemaError("dataset: metadata.if_hz must be positive");
}

}  // namespace hetcal
