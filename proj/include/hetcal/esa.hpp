// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "hetcal/receiver.hpp"

// Spectrum-analyzer emulation: frequency axis, RBW filter families with
// their analytic equivalent noise bandwidth, and the expected (noise-free)
// linear power spectra of the three protocol acquisitions.

namespace hetcal {

enum class FilterFamily { gaussian, supergaussian, rectangular };

struct EsaConfig {
  double center_hz = 20.0e6;
  double span_hz = 10.0e6;
  double rbw_hz = 1.0e6;
  int n_bins = 2001;
  int n_avg = 100;
  FilterFamily filter_family = FilterFamily::gaussian;
  // Exponent p of the supergaussian family |H|^2 = 2^-((2f/RBW)^2)^p;
  // ignored for the other families. p = 1 reproduces the gaussian.
  double supergaussian_order = 1.0;
  double reference_power = 1.0;  ///< linear power corresponding to 0 dBmV
};

void validate(const EsaConfig& cfg);

/// Uniform axis of n_bins points covering [center - span/2, center + span/2].
std::vector<double> frequency_axis(const EsaConfig& cfg);

double bin_spacing(const EsaConfig& cfg);

/// Normalized power response |H(f)/H(0)|^2 at a single offset from the
/// filter center. The gaussian family has its -3 dB full width equal to
/// the RBW; the rectangular family is 1 inside +-RBW/2 (0.5 on the edge).
double filter_power_response(const EsaConfig& cfg, double f_offset_hz);

/// Same response evaluated over an axis, centered on tone_hz.
void filter_power_response(const EsaConfig& cfg, std::span<const double> freq_hz,
                           double tone_hz, std::span<double> out);

/// Closed-form equivalent noise bandwidth of the configured filter.
double analytic_enbw(const EsaConfig& cfg);

/// Supergaussian exponent p whose ENBW/RBW ratio equals `ratio`
/// (valid for ratio in (1, 1/ln2)); solved once and stored in config.
double supergaussian_order_for_enbw_ratio(double ratio);

enum class TraceKind { electronic, shot, quadrature };

/// Expected per-bin linear power of one acquisition. Electronic: flat
/// s_elec * ENBW. Shot: (S_shot + s_elec) * ENBW. Quadrature: shot level
/// plus the beat tone read through the RBW filter at full power.
std::vector<double> expected_spectrum(const ReceiverParams& rx, const FieldParams& fields,
                                      const EsaConfig& cfg, TraceKind kind, double s_elec);

struct Trace {
  std::vector<double> freq_hz;
  std::vector<double> values_dbmv;
};

void validate(const Trace& trace);

}  // namespace hetcal
