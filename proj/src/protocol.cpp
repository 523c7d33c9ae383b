// SPDX-License-Identifier: Apache-2.0
#include "hetcal/protocol.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "hetcal/constants.hpp"
#include "hetcal/errors.hpp"
#include "hetcal/kernels.hpp"
#include "hetcal/rng.hpp"

namespace hetcal {

namespace stream {
constexpr std::uint64_t electronic = 0;
constexpr std::uint64_t dark = 1;
constexpr std::uint64_t shot = 2;
constexpr std::uint64_t quadrature = 3;
constexpr std::uint64_t monitor = 4;
constexpr std::uint64_t enbw_cal = 5;
}  // namespace stream

void validate(const Scenario& sc) {
  validate(sc.rx);
  validate(sc.fields, sc.max_flux_ratio);
  validate(sc.channel);
  validate(sc.esa);
  validate(sc.monitor);
  if (sc.s_elec < 0.0) throw InvariantError("scenario.s_elec must be >= 0");
  if (sc.n_repeats < 1) throw InvariantError("scenario.n_repeats must be >= 1");
  if (sc.monitor_sample_count < 1) {
    throw InvariantError("scenario.monitor_sample_count must be >= 1");
  }
  if (sc.dark_sample_count < 1) throw InvariantError("scenario.dark_sample_count must be >= 1");
  if (sc.nd_attenuation_l <= 0.0 || sc.nd_attenuation_l > 1.0) {
    throw InvariantError("scenario.nd_attenuation_l must be in (0, 1]");
  }
  if (std::abs(sc.fields.if_hz - sc.esa.center_hz) >= 0.5 * sc.esa.span_hz) {
    throw InvariantError("fields.if_hz lies outside the esa span (esa.center_hz/esa.span_hz)");
  }
}

double reference_power_w(const Scenario& sc) {
  return photon_energy_j(sc.fields.wavelength_m) * sc.fields.photon_flux_signal;
}

double effective_efficiency(const Scenario& sc) {
  return lumped_efficiency(sc.rx) * sc.channel.product();
}

Dataset run_acquisition(const Scenario& sc, std::uint64_t point_index,
                        std::uint64_t repeat_index) {
  validate(sc);
  const FieldParams at_receiver = apply_attenuation(sc.fields, sc.channel);

  const auto expected_elec =
      expected_spectrum(sc.rx, at_receiver, sc.esa, TraceKind::electronic, sc.s_elec);
  const auto expected_shot =
      expected_spectrum(sc.rx, at_receiver, sc.esa, TraceKind::shot, sc.s_elec);
  const auto expected_quad =
      expected_spectrum(sc.rx, at_receiver, sc.esa, TraceKind::quadrature, sc.s_elec);

  auto realize = [&](const std::vector<double>& expected, std::uint64_t id) {
    if (sc.deterministic) return expected_to_trace(expected, sc.esa);
    Rng rng(derive_seed(sc.seed, {point_index, repeat_index, id}));
    return sample_trace(expected, sc.esa, rng);
  };

  Dataset ds;
  ds.esa = sc.esa;

  // Both-blocked step: electronic trace plus the monitor dark batch.
  Trace elec = realize(expected_elec, stream::electronic);
  {
    std::vector<double> dark;
    if (sc.deterministic) {
      dark = synthesize_monitor_samples(sc.monitor, 0.0, sc.dark_sample_count, nullptr);
    } else {
      Rng rng(derive_seed(sc.seed, {point_index, repeat_index, stream::dark}));
      dark = synthesize_monitor_samples(sc.monitor, 0.0, sc.dark_sample_count, &rng);
    }
    ds.monitor.dark_mean_v = kernels::mean(dark);
  }

  // LO-only shot reference, then signal + LO beat trace.
  Trace shot = realize(expected_shot, stream::shot);
  Trace quad = realize(expected_quad, stream::quadrature);

  // Synchronous monitor batch; the monitor taps the signal ahead of the
  // fixed ND filter, so it sees the reference-plane power divided by l.
  const double monitor_power_uw =
      reference_power_w(sc) * 1e6 / sc.nd_attenuation_l;
  if (sc.deterministic) {
    ds.monitor.samples_v = synthesize_monitor_samples(sc.monitor, monitor_power_uw,
                                                      sc.monitor_sample_count, nullptr);
  } else {
    Rng rng(derive_seed(sc.seed, {point_index, repeat_index, stream::monitor}));
    ds.monitor.samples_v = synthesize_monitor_samples(sc.monitor, monitor_power_uw,
                                                      sc.monitor_sample_count, &rng);
  }
  ds.monitor.responsivity_v_per_uw = sc.monitor.responsivity_v_per_uw;
  ds.monitor.attenuation_l = sc.nd_attenuation_l;

  ds.freq_hz = std::move(elec.freq_hz);
  ds.electronic_dbmv = std::move(elec.values_dbmv);
  ds.shot_dbmv = std::move(shot.values_dbmv);
  ds.quadrature_dbmv = std::move(quad.values_dbmv);

  ds.metadata.wavelength_m = sc.fields.wavelength_m;
  ds.metadata.if_hz = sc.fields.if_hz;
  ds.metadata.seed = derive_seed(sc.seed, {point_index, repeat_index});
  ds.metadata.timestamp_iso8601 = sc.timestamp_iso8601;

  ds.ground_truth = GroundTruth{effective_efficiency(sc), reference_power_w(sc)};

  validate(ds);
  return ds;
}

std::vector<Dataset> run_protocol(const Scenario& sc, std::uint64_t point_index) {
  validate(sc);
  std::vector<Dataset> datasets;
  datasets.reserve(static_cast<std::size_t>(sc.n_repeats));
  for (int i = 0; i < sc.n_repeats; ++i) {
    datasets.push_back(run_acquisition(sc, point_index, static_cast<std::uint64_t>(i)));
  }
  return datasets;
}

EnbwResult calibrate_enbw(const Scenario& sc, const EnbwCalSettings& settings,
                          const EnbwOptions& opts, std::uint64_t point_index) {
  if (settings.n_bins < 32) throw InvariantError("enbw_cal.n_bins must be >= 32");
  if (settings.repeats < 1) throw InvariantError("enbw_cal.repeats must be >= 1");
  EsaConfig cfg = sc.esa;
  cfg.n_bins = settings.n_bins;
  // The filter characterization needs a span well beyond the filter skirts.
  cfg.span_hz = std::max(cfg.span_hz, 10.0 * cfg.rbw_hz);

  EnbwOptions anchored = opts;
  anchored.tone_hz = cfg.center_hz;

  std::vector<Trace> traces;
  const int count = settings.sampled ? settings.repeats : 1;
  traces.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    if (settings.sampled && !sc.deterministic) {
      Rng rng(derive_seed(sc.seed,
                          {point_index, static_cast<std::uint64_t>(r), stream::enbw_cal}));
      traces.push_back(synthesize_tone_cal_trace(cfg, cfg.center_hz, settings.tone_power,
                                                 settings.noise_floor_power, &rng));
    } else {
      traces.push_back(synthesize_tone_cal_trace(cfg, cfg.center_hz, settings.tone_power,
                                                 settings.noise_floor_power, nullptr));
    }
  }
  return compute_enbw(traces, cfg.rbw_hz, anchored);
}

ValidationReport run_validation(const Scenario& sc, const RunOptions& opts) {
  const std::vector<Dataset> datasets = run_protocol(sc);
  const EnbwResult enbw = calibrate_enbw(sc, opts.enbw_cal, opts.enbw);
  const EfficiencyEstimate est = analyze_datasets(datasets, enbw, opts.analysis);

  ValidationReport report;
  report.estimate = est;
  report.eta_true = effective_efficiency(sc);
  report.rel_error = std::abs(est.eta.value - report.eta_true) / report.eta_true;
  report.e_n = std::abs(est.eta.value - report.eta_true) / est.eta.expanded(2.0);
  report.agree = report.e_n <= 1.0;
  return report;
}

void validate(const SweepSpec& spec) {
  if (spec.points.size() < 2) throw InvariantError("sweep.points requires at least 2 points");
  for (double p : spec.points) validate(scenario_at(spec, p));
}

Scenario scenario_at(const SweepSpec& spec, double point) {
  Scenario sc = spec.base;
  switch (spec.axis) {
    case SweepAxis::signal_power:
      if (point <= 0.0) throw InvariantError("sweep: signal power points must be positive");
      sc.fields.photon_flux_signal = point / photon_energy_j(sc.fields.wavelength_m);
      break;
    case SweepAxis::attenuation:
      if (point <= 0.0 || point > 1.0) {
        throw InvariantError("sweep: attenuation points must be in (0, 1]");
      }
      sc.channel.transmissions = {point};
      break;
    case SweepAxis::if_frequency:
      if (point <= 0.0) throw InvariantError("sweep: IF points must be positive");
      sc.fields.if_hz = point;
      sc.esa.center_hz = point;
      break;
  }
  return sc;
}

namespace {

SlopeFit weighted_loglog_fit(const std::vector<SweepPoint>& points) {
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const SweepPoint& p : points) {
    const double x = std::log10(p.axis_value);
    const double y = std::log10(p.estimate.eta.value);
    const double rel = p.estimate.eta.relative();
    const double sigma_y = rel > 0.0 ? rel / std::numbers::ln10 : 0.0;
    const double w = sigma_y > 0.0 ? 1.0 / (sigma_y * sigma_y) : 1.0;
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double denom = sw * sxx - sx * sx;
  SlopeFit fit;
  fit.slope = (sw * sxy - sx * sy) / denom;
  fit.intercept = (sxx * sy - sx * sxy) / denom;
  fit.slope_u = std::sqrt(sw / denom);
  return fit;
}

}  // namespace

SweepReport run_sweep(const SweepSpec& spec, const RunOptions& opts) {
  validate(spec);
  SweepReport report;
  report.axis = spec.axis;
  report.points.reserve(spec.points.size());

  for (std::size_t j = 0; j < spec.points.size(); ++j) {
    const Scenario sc = scenario_at(spec, spec.points[j]);
    const std::vector<Dataset> datasets = run_protocol(sc, j);
    const EnbwResult enbw = calibrate_enbw(sc, opts.enbw_cal, opts.enbw, j);
    const EfficiencyEstimate est = analyze_datasets(datasets, enbw, opts.analysis);

    SweepPoint point;
    point.axis_value = spec.points[j];
    point.estimate = est;
    point.eta_true = effective_efficiency(sc);
    point.e_n = std::abs(est.eta.value - point.eta_true) / est.eta.expanded(2.0);
    report.points.push_back(point);
  }

  double acc = 0.0;
  for (const SweepPoint& p : report.points) acc += p.estimate.eta.value;
  report.mean_eta = acc / static_cast<double>(report.points.size());

  if (spec.axis == SweepAxis::attenuation) {
    report.loglog_fit = weighted_loglog_fit(report.points);
  }
  return report;
}

}  // namespace hetcal
