// SPDX-License-Identifier: Apache-2.0
#include "hetcal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetcal/constants.hpp"
#include "hetcal/detail/kernel_elems.hpp"
#include "hetcal/errors.hpp"
#include "hetcal/kernels.hpp"

namespace hetcal {

namespace {

struct PeakReadout {
  double value;        // interpolated level, same unit as the input values
  double offset_bins;  // sub-bin offset of the vertex
};

// 3-point parabola through (idx-1, idx, idx+1) in the (log-domain) values.
// Falls back to the anchor bin when the points are not concave or the
// vertex leaves the center bin.
PeakReadout log_parabolic_peak(std::span<const double> values, std::size_t idx) {
  if (idx == 0 || idx + 1 >= values.size()) return {values[idx], 0.0};
  const double ym = values[idx - 1];
  const double y0 = values[idx];
  const double yp = values[idx + 1];
  const double a = 0.5 * (ym + yp) - y0;
  if (!(a < 0.0)) return {y0, 0.0};
  const double b = 0.5 * (yp - ym);
  const double offset = -b / (2.0 * a);
  if (std::abs(offset) > 1.0) return {y0, 0.0};
  return {y0 - b * b / (4.0 * a), offset};
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

// Index of the maximum; for a flat-topped response (ties) the middle of the
// plateau, so the 3-point parabola sees symmetric neighbors.
std::size_t argmax_plateau_mid(std::span<const double> values) {
  std::size_t first = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[first]) first = i;
  }
  std::size_t last = first;
  while (last + 1 < values.size() && values[last + 1] == values[first]) ++last;
  return first + (last - first) / 2;
}

double sample_std(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::size_t nearest_bin(std::span<const double> freq, double target) {
  const auto it = std::lower_bound(freq.begin(), freq.end(), target);
  if (it == freq.begin()) return 0;
  if (it == freq.end()) return freq.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - freq.begin());
  return (target - freq[hi - 1] <= freq[hi] - target) ? hi - 1 : hi;
}

}  // namespace

std::vector<double> dbmv_to_linear(std::span<const double> values_dbmv,
                                   double reference_power) {
  if (reference_power <= 0.0) throw InvariantError("reference_power must be positive");
  std::vector<double> out(values_dbmv.size());
  kernels::linear_from_dbmv(values_dbmv, reference_power, out);
  return out;
}

std::vector<double> linear_to_dbmv(std::span<const double> values_linear,
                                   double reference_power) {
  if (reference_power <= 0.0) throw InvariantError("reference_power must be positive");
  std::vector<double> out(values_linear.size());
  kernels::dbmv_from_linear(values_linear, reference_power, kPowerFloor, out);
  return out;
}

EnbwResult compute_enbw(std::span<const Trace> traces, double rbw_hz,
                        const EnbwOptions& opts) {
  if (traces.empty()) throw InvariantError("compute_enbw: at least one trace required");
  if (rbw_hz <= 0.0) throw InvariantError("compute_enbw: rbw_hz must be positive");

  std::vector<double> results;
  results.reserve(traces.size());
  for (const Trace& trace : traces) {
    validate(trace);
    const std::span<const double> dbmv(trace.values_dbmv);
    const std::size_t peak_idx = opts.tone_hz ? nearest_bin(trace.freq_hz, *opts.tone_hz)
                                              : argmax_plateau_mid(dbmv);

    const double med = median(trace.values_dbmv);
    if (dbmv[peak_idx] < med + opts.min_peak_clearance_db) {
      throw AnalysisError("compute_enbw: no dominant tone (peak is less than " +
                          std::to_string(opts.min_peak_clearance_db) +
                          " dB above the trace median)");
    }

    // Reference power cancels in |H/H0|^2; convert with ref = 1.
    std::vector<double> linear(dbmv.size());
    kernels::linear_from_dbmv(dbmv, 1.0, linear);
    const double step = (trace.freq_hz.back() - trace.freq_hz.front()) /
                        static_cast<double>(trace.freq_hz.size() - 1);
    const double integral = kernels::trapezoid_uniform(linear, step);

    const PeakReadout peak = log_parabolic_peak(dbmv, peak_idx);
    const double peak_linear = kernels::detail::linear_from_dbmv_elem(peak.value, 1.0);
    results.push_back(integral / peak_linear);
  }

  EnbwResult out;
  out.rbw_hz = rbw_hz;
  if (results.size() >= 2) {
    out.enbw_hz = combine_repeats(results, UncKind::type_a);
  } else {
    out.enbw_hz = {results.front(), opts.type_b_rel * results.front(), UncKind::type_b};
  }
  if (out.enbw_hz.value <= 0.0) throw AnalysisError("compute_enbw: non-positive ENBW");
  out.ratio = out.enbw_hz.value / rbw_hz;
  return out;
}

UncertainValue calibrated_power_w(const PowerCalibration& cal) {
  if (cal.attenuation_l.value <= 0.0) throw InvariantError("attenuation_l must be positive");
  if (cal.responsivity_r.value <= 0.0) throw InvariantError("responsivity_r must be positive");
  if (cal.voltage_v.value <= 0.0) {
    throw AnalysisError(
        "calibrated power: dark-corrected monitor voltage is not positive "
        "(signal off or miswired monitor)");
  }
  const double p =
      cal.voltage_v.value * (cal.attenuation_l.value / cal.responsivity_r.value) * 1e-6;
  const double rels[] = {cal.voltage_v.relative(), cal.attenuation_l.relative(),
                         cal.responsivity_r.relative()};
  const double rel = propagate_relative(rels);
  return {p, p * rel, UncKind::combined};
}

double extract_spectral_ratio(const Dataset& ds, const RatioOptions& opts) {
  validate(ds);
  const double ref = ds.esa.reference_power;
  const double if_hz = ds.metadata.if_hz;
  if (std::abs(if_hz - ds.esa.center_hz) >= 0.5 * ds.esa.span_hz) {
    throw AnalysisError("spectral ratio: IF tone lies outside the trace span");
  }

  const std::size_t n = ds.freq_hz.size();
  std::vector<double> elec(n), shot(n), quad(n);
  kernels::linear_from_dbmv(ds.electronic_dbmv, ref, elec);
  kernels::linear_from_dbmv(ds.shot_dbmv, ref, shot);
  kernels::linear_from_dbmv(ds.quadrature_dbmv, ref, quad);

  // Shot level N0: mean of the electronic-corrected shot trace over the
  // noise region (default: full span), before any clamping so that a
  // miscalibrated electronic trace is detected.
  std::size_t lo = 0, hi = n;  // [lo, hi)
  if (opts.noise_region_hz) {
    lo = nearest_bin(ds.freq_hz, opts.noise_region_hz->first);
    hi = nearest_bin(ds.freq_hz, opts.noise_region_hz->second) + 1;
    if (hi <= lo + 1) throw InvariantError("noise_region_hz selects fewer than 2 bins");
  }
  std::size_t ex_lo = hi, ex_hi = hi;  // empty
  if (opts.noise_exclude_hz) {
    ex_lo = std::max(lo, nearest_bin(ds.freq_hz, opts.noise_exclude_hz->first));
    ex_hi = std::min(hi, nearest_bin(ds.freq_hz, opts.noise_exclude_hz->second) + 1);
    if (ex_hi < ex_lo) {
      ex_lo = hi;
      ex_hi = hi;
    }
  }
  auto region_sum = [&](std::span<const double> v) {
    const double left = kernels::sum(v.subspan(lo, ex_lo - lo));
    const double right = kernels::sum(v.subspan(ex_hi, hi - ex_hi));
    return left + right;
  };
  const double count = static_cast<double>((ex_lo - lo) + (hi - ex_hi));
  if (count < 1.0) throw InvariantError("noise region is empty after exclusion");
  const double n0 = (region_sum(shot) - region_sum(elec)) / count;
  if (n0 <= 0.0) {
    throw AnalysisError(
        "spectral ratio: corrected shot level is not positive (electronic trace "
        "exceeds shot trace; miscalibrated inputs)");
  }

  // Tone power S: background-corrected quadrature minus corrected shot,
  // read at the IF with sub-bin interpolation in the log domain.
  std::vector<double> corr_quad(n), corr_shot(n), diff(n), diff_dbmv(n);
  kernels::subtract_clamped(quad, elec, kPowerFloor, corr_quad);
  kernels::subtract_clamped(shot, elec, kPowerFloor, corr_shot);
  kernels::subtract_clamped(corr_quad, corr_shot, kPowerFloor, diff);
  kernels::dbmv_from_linear(diff, ref, kPowerFloor, diff_dbmv);

  const double halfwidth = opts.tone_halfwidth_hz.value_or(2.0 * ds.esa.rbw_hz);
  if (halfwidth <= 0.0) throw InvariantError("tone_halfwidth_hz must be positive");
  const std::size_t anchor = nearest_bin(ds.freq_hz, if_hz);
  if (std::abs(ds.freq_hz[anchor] - if_hz) > halfwidth) {
    throw AnalysisError("spectral ratio: no trace bin inside the tone window");
  }
  const PeakReadout peak = log_parabolic_peak(diff_dbmv, anchor);
  const double s = kernels::detail::linear_from_dbmv_elem(peak.value, ref);

  if (s < opts.min_snr * n0) {
    throw AnalysisError("spectral ratio: tone peak is below " +
                        std::to_string(opts.min_snr) +
                        " times the shot level (insufficient SNR)");
  }
  return s / n0;
}

UncertainValue combine_repeats(std::span<const double> values, UncKind kind) {
  if (values.empty()) throw InvariantError("combine_repeats: empty input");
  const double m = kernels::mean(values);
  if (values.size() == 1) return {m, 0.0, kind};
  const double sem =
      sample_std(values, m) / std::sqrt(static_cast<double>(values.size()));
  return {m, sem, kind};
}

EfficiencyEstimate estimate_efficiency(const UncertainValue& x,
                                       const UncertainValue& p_alpha_w,
                                       const EnbwResult& enbw, double wavelength_m,
                                       double type_b_rel, double k) {
  if (p_alpha_w.value <= 0.0) throw InvariantError("p_alpha_w must be positive");
  if (enbw.enbw_hz.value <= 0.0) throw InvariantError("enbw must be positive");
  if (wavelength_m <= 0.0) throw InvariantError("wavelength_m must be positive");
  if (x.value < 0.0) throw InvariantError("x ratio must be >= 0");
  if (type_b_rel < 0.0) throw InvariantError("type_b_rel must be >= 0");
  if (k <= 0.0) throw InvariantError("coverage factor k must be positive");

  const double eta =
      photon_energy_j(wavelength_m) * enbw.enbw_hz.value * x.value / (2.0 * p_alpha_w.value);

  EfficiencyEstimate est;
  est.budget.rel_p_alpha = p_alpha_w.relative();
  est.budget.rel_enbw = enbw.enbw_hz.relative();
  est.budget.rel_x = x.relative();
  est.budget.rel_type_b = type_b_rel;
  const double rels[] = {est.budget.rel_p_alpha, est.budget.rel_enbw, est.budget.rel_x,
                         est.budget.rel_type_b};
  const double rel = propagate_relative(rels);

  est.eta = {eta, eta * rel, UncKind::combined};
  est.k = k;
  est.expanded_u = est.eta.expanded(k);
  est.x_ratio = x.value;
  est.p_alpha_w = p_alpha_w.value;
  est.enbw_hz = enbw.enbw_hz.value;

  if (eta > 1.0 + 3.0 * est.eta.u_std) {
    throw AnalysisError("estimated efficiency exceeds 1 beyond 3 sigma "
                        "(inconsistent calibration)");
  }
  return est;
}

double propagate_relative(std::span<const double> rel_components) {
  double acc = 0.0;
  for (double r : rel_components) {
    if (r < 0.0) throw InvariantError("relative components must be >= 0");
    acc += r * r;
  }
  return std::sqrt(acc);
}

UncertainValue loss_chain_estimate(std::span<const UncertainValue> factors,
                                   const UncertainValue& delta_tau) {
  if (std::abs(delta_tau.value) > 0.5) {
    throw InvariantError("delta_tau must satisfy 4*delta_tau^2 <= 1");
  }
  const double balance = 1.0 - 4.0 * delta_tau.value * delta_tau.value;
  double value = balance;
  double rel_sq = 0.0;
  for (const UncertainValue& f : factors) {
    if (f.value <= 0.0) throw InvariantError("loss-chain factors must be positive");
    value *= f.value;
    rel_sq += f.relative() * f.relative();
  }
  // d(eta)/d(delta_tau) relative sensitivity: 8*dt / (1 - 4*dt^2).
  const double dt_rel = 8.0 * std::abs(delta_tau.value) * delta_tau.u_std / balance;
  rel_sq += dt_rel * dt_rel;
  return {value, value * std::sqrt(rel_sq), UncKind::combined};
}

Comparison compare_estimates(double value_a, double expanded_a, double value_b,
                             double expanded_b) {
  if (expanded_a <= 0.0 || expanded_b <= 0.0) {
    throw InvariantError("compare_estimates: expanded uncertainties must be positive");
  }
  const double e_n =
      std::abs(value_a - value_b) / std::hypot(expanded_a, expanded_b);
  return {e_n, e_n <= 1.0};
}

EfficiencyEstimate analyze_datasets(std::span<const Dataset> datasets,
                                    const EnbwResult& enbw, const AnalysisOptions& opts) {
  if (datasets.empty()) throw InvariantError("analyze_datasets: no datasets supplied");
  const Dataset& first = datasets.front();
  for (const Dataset& ds : datasets) {
    if (ds.monitor.attenuation_l != first.monitor.attenuation_l ||
        ds.monitor.responsivity_v_per_uw != first.monitor.responsivity_v_per_uw ||
        ds.metadata.wavelength_m != first.metadata.wavelength_m) {
      throw SchemaError("analyze_datasets: datasets mix calibration constants");
    }
  }

  std::vector<double> x_values, v_values;
  x_values.reserve(datasets.size());
  v_values.reserve(datasets.size());
  for (const Dataset& ds : datasets) {
    x_values.push_back(extract_spectral_ratio(ds, opts.ratio));
    v_values.push_back(kernels::mean(ds.monitor.samples_v) - ds.monitor.dark_mean_v);
  }

  const UncertainValue x = combine_repeats(x_values);
  UncertainValue v = combine_repeats(v_values);
  if (datasets.size() == 1 && first.monitor.samples_v.size() >= 2) {
    // Single acquisition: fall back to the within-batch standard error.
    const double batch_mean = kernels::mean(first.monitor.samples_v);
    v.u_std = sample_std(first.monitor.samples_v, batch_mean) /
              std::sqrt(static_cast<double>(first.monitor.samples_v.size()));
  }

  PowerCalibration cal;
  cal.attenuation_l = {first.monitor.attenuation_l,
                       opts.rel_u_attenuation * first.monitor.attenuation_l,
                       UncKind::type_b};
  cal.responsivity_r = {first.monitor.responsivity_v_per_uw,
                        opts.rel_u_responsivity * first.monitor.responsivity_v_per_uw,
                        UncKind::type_b};
  cal.voltage_v = v;
  const UncertainValue p_alpha = calibrated_power_w(cal);

  return estimate_efficiency(x, p_alpha, enbw, first.metadata.wavelength_m,
                             opts.type_b_rel, opts.k);
}

}  // namespace hetcal
