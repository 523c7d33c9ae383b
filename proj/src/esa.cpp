// SPDX-License-Identifier: Apache-2.0
#include "hetcal/esa.hpp"

#include <cmath>
#include <stdexcept>

#include "hetcal/constants.hpp"
#include "hetcal/detail/kernel_elems.hpp"
#include "hetcal/errors.hpp"
#include "hetcal/kernels.hpp"

namespace hetcal {

void validate(const EsaConfig& cfg) {
  if (cfg.center_hz <= 0.0) throw InvariantError("esa.center_hz must be positive");
  if (cfg.span_hz <= 0.0) throw InvariantError("esa.span_hz must be positive");
  if (cfg.rbw_hz <= 0.0) throw InvariantError("esa.rbw_hz must be positive");
  if (cfg.rbw_hz > cfg.span_hz) throw InvariantError("esa.rbw_hz must not exceed esa.span_hz");
  if (cfg.n_bins < 32) throw InvariantError("esa.n_bins must be >= 32");
  if (cfg.n_avg < 1) throw InvariantError("esa.n_avg must be >= 1");
  if (cfg.reference_power <= 0.0) throw InvariantError("esa.reference_power must be positive");
  if (cfg.filter_family == FilterFamily::supergaussian && cfg.supergaussian_order <= 0.0) {
    throw InvariantError("esa.supergaussian_order must be positive");
  }
}

std::vector<double> frequency_axis(const EsaConfig& cfg) {
  std::vector<double> freq(static_cast<std::size_t>(cfg.n_bins));
  const double start = cfg.center_hz - 0.5 * cfg.span_hz;
  const double step = bin_spacing(cfg);
  for (std::size_t i = 0; i < freq.size(); ++i) {
    freq[i] = start + static_cast<double>(i) * step;
  }
  return freq;
}

double bin_spacing(const EsaConfig& cfg) {
  return cfg.span_hz / static_cast<double>(cfg.n_bins - 1);
}

double filter_power_response(const EsaConfig& cfg, double f_offset_hz) {
  namespace kd = kernels::detail;
  switch (cfg.filter_family) {
    case FilterFamily::gaussian:
      return kd::supergaussian_response_elem(f_offset_hz, 0.0, 2.0 / cfg.rbw_hz, 1.0);
    case FilterFamily::supergaussian:
      return kd::supergaussian_response_elem(f_offset_hz, 0.0, 2.0 / cfg.rbw_hz,
                                             cfg.supergaussian_order);
    case FilterFamily::rectangular:
      return kd::rectangular_response_elem(f_offset_hz, 0.0, 0.5 * cfg.rbw_hz);
  }
  throw std::logic_error("unknown filter family");
}

void filter_power_response(const EsaConfig& cfg, std::span<const double> freq_hz,
                           double tone_hz, std::span<double> out) {
  switch (cfg.filter_family) {
    case FilterFamily::gaussian:
      kernels::supergaussian_response(freq_hz, tone_hz, cfg.rbw_hz, 1.0, out);
      return;
    case FilterFamily::supergaussian:
      kernels::supergaussian_response(freq_hz, tone_hz, cfg.rbw_hz,
                                      cfg.supergaussian_order, out);
      return;
    case FilterFamily::rectangular:
      kernels::rectangular_response(freq_hz, tone_hz, cfg.rbw_hz, out);
      return;
  }
  throw std::logic_error("unknown filter family");
}

namespace {

// ENBW/RBW of the supergaussian family as a function of s = 1/(2p):
// Gamma(1+s) * ln2^-s. Decreases from 1/ln2 at p=1/2 toward 1 as p grows.
double supergaussian_enbw_ratio(double order) {
  const double s = 1.0 / (2.0 * order);
  return std::exp(std::lgamma(1.0 + s) - s * std::log(kLn2));
}

}  // namespace

double analytic_enbw(const EsaConfig& cfg) {
  switch (cfg.filter_family) {
    case FilterFamily::gaussian:
      return cfg.rbw_hz * supergaussian_enbw_ratio(1.0);
    case FilterFamily::supergaussian:
      return cfg.rbw_hz * supergaussian_enbw_ratio(cfg.supergaussian_order);
    case FilterFamily::rectangular:
      return cfg.rbw_hz;
  }
  throw std::logic_error("unknown filter family");
}

double supergaussian_order_for_enbw_ratio(double ratio) {
  if (!(ratio > 1.0) || !(ratio < 1.0 / kLn2)) {
    throw InvariantError("enbw ratio target must lie in (1, 1/ln2) for the supergaussian family");
  }
  // Ratio is monotone decreasing in p; bisect on p.
  double lo = 0.5, hi = 64.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (supergaussian_enbw_ratio(mid) > ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> expected_spectrum(const ReceiverParams& rx, const FieldParams& fields,
                                      const EsaConfig& cfg, TraceKind kind, double s_elec) {
  validate(cfg);
  if (s_elec < 0.0) throw InvariantError("s_elec must be >= 0");
  const double enbw = analytic_enbw(cfg);
  const std::size_t n = static_cast<std::size_t>(cfg.n_bins);

  if (kind == TraceKind::electronic) {
    return std::vector<double>(n, s_elec * enbw);
  }

  const double shot_level = (shot_noise_variance_density(rx, fields) + s_elec) * enbw;
  std::vector<double> spectrum(n, shot_level);
  if (kind == TraceKind::shot) return spectrum;

  // Quadrature: a CW tone passes the RBW filter at full power at its peak.
  if (std::abs(fields.if_hz - cfg.center_hz) >= 0.5 * cfg.span_hz) {
    throw InvariantError("fields.if_hz lies outside the esa span (esa.center_hz/esa.span_hz)");
  }
  const std::vector<double> freq = frequency_axis(cfg);
  std::vector<double> shape(n);
  filter_power_response(cfg, freq, fields.if_hz, shape);
  kernels::add_scaled(spectrum, shape, beat_power_rms(rx, fields), spectrum);
  return spectrum;
}

void validate(const Trace& trace) {
  if (trace.freq_hz.size() != trace.values_dbmv.size()) {
    throw SchemaError("trace: freq_hz and values_dbmv lengths differ");
  }
  if (trace.freq_hz.size() < 2) throw SchemaError("trace: requires at least 2 points");
  const double step =
      (trace.freq_hz.back() - trace.freq_hz.front()) /
      static_cast<double>(trace.freq_hz.size() - 1);
  if (!(step > 0.0)) throw SchemaError("trace: frequency axis must be ascending");
  for (std::size_t i = 1; i < trace.freq_hz.size(); ++i) {
    const double d = trace.freq_hz[i] - trace.freq_hz[i - 1];
    if (!(d > 0.0) || std::abs(d - step) > 1e-6 * step) {
      throw SchemaError("trace: frequency axis must be uniform and ascending");
    }
  }
}

}  // namespace hetcal
