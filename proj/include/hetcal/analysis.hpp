// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hetcal/synth.hpp"

// Calibration pipeline: dB conversions, ENBW from a narrow-tone trace,
// radiometric power conversion, spectral-ratio extraction and the
// efficiency estimator with its relative-quadrature uncertainty budget.

namespace hetcal {

enum class UncKind { type_a, type_b, combined };

struct UncertainValue {
  double value = 0.0;
  double u_std = 0.0;  ///< standard uncertainty, k = 1
  UncKind kind = UncKind::combined;

  double relative() const { return value != 0.0 ? u_std / std::abs(value) : 0.0; }
  double expanded(double k) const { return k * u_std; }
};

struct EnbwResult {
  UncertainValue enbw_hz;
  double rbw_hz = 0.0;
  double ratio = 0.0;  ///< enbw / rbw
};

struct EnbwOptions {
  double type_b_rel = 0.003;  ///< relative uncertainty when no repeats are supplied
  /// Known tone frequency: anchors the peak readout instead of searching.
  std::optional<double> tone_hz;
  double min_peak_clearance_db = 20.0;
};

/// ENBW = integral of |H(f)/H(f0)|^2 over the span (trapezoid rule), with
/// the peak located by 3-point parabolic interpolation in the log domain.
/// Multiple traces give a Type-A spread; a single trace gets the Type-B
/// default.
EnbwResult compute_enbw(std::span<const Trace> traces, double rbw_hz,
                        const EnbwOptions& opts = {});

struct PowerCalibration {
  UncertainValue attenuation_l;   ///< dimensionless ND transmission
  UncertainValue responsivity_r;  ///< V per microwatt
  UncertainValue voltage_v;       ///< dark-corrected monitor voltage
};

/// P = V * (l / R) * 1e-6 watts; relative uncertainties add in quadrature.
UncertainValue calibrated_power_w(const PowerCalibration& cal);

struct RatioOptions {
  std::optional<double> tone_halfwidth_hz;  ///< default 2 * RBW
  std::optional<std::pair<double, double>> noise_region_hz;   ///< default full span
  std::optional<std::pair<double, double>> noise_exclude_hz;  ///< spur masking
  double min_snr = 3.0;
};

/// X = S / N0 from one dataset: traces to linear, electronic background
/// subtracted, N0 the mean corrected shot level, S the tone read from the
/// background-corrected quadrature trace at the IF.
double extract_spectral_ratio(const Dataset& ds, const RatioOptions& opts = {});

/// Mean with standard error of the mean (u = 0 for a single value).
UncertainValue combine_repeats(std::span<const double> values,
                               UncKind kind = UncKind::type_a);

struct UncertaintyBudget {
  double rel_p_alpha = 0.0;
  double rel_enbw = 0.0;
  double rel_x = 0.0;
  double rel_type_b = 0.0;
};

struct EfficiencyEstimate {
  UncertainValue eta;
  double expanded_u = 0.0;
  double k = 2.0;
  UncertaintyBudget budget;
  double x_ratio = 0.0;
  double p_alpha_w = 0.0;
  double enbw_hz = 0.0;
};

/// eta = hbar*omega * B_neq * X / (2 * P_alpha), with the combined relative
/// uncertainty from Type-A/B inputs plus the model Type-B term.
EfficiencyEstimate estimate_efficiency(const UncertainValue& x,
                                       const UncertainValue& p_alpha_w,
                                       const EnbwResult& enbw, double wavelength_m,
                                       double type_b_rel = 0.005, double k = 2.0);

/// Quadrature sum of relative components.
double propagate_relative(std::span<const double> rel_components);

/// Independent loss-chain estimate (1 - 4*d_tau^2) * product(factors) with
/// first-order propagation of the factor and imbalance uncertainties.
UncertainValue loss_chain_estimate(std::span<const UncertainValue> factors,
                                   const UncertainValue& delta_tau);

struct Comparison {
  double e_n = 0.0;
  bool agree = false;
};

/// Normalized error |a-b| / sqrt(Ua^2 + Ub^2) on expanded uncertainties.
Comparison compare_estimates(double value_a, double expanded_a, double value_b,
                             double expanded_b);

struct AnalysisOptions {
  RatioOptions ratio;
  double rel_u_attenuation = 0.006;    ///< Type-B on the fixed ND factor l
  double rel_u_responsivity = 0.0045;  ///< Type-B on the monitor responsivity R
  double type_b_rel = 0.005;           ///< model Type-B on eta
  double k = 2.0;
};

/// Full pipeline over repeated acquisitions sharing one configuration.
EfficiencyEstimate analyze_datasets(std::span<const Dataset> datasets,
                                    const EnbwResult& enbw,
                                    const AnalysisOptions& opts = {});

std::vector<double> dbmv_to_linear(std::span<const double> values_dbmv,
                                   double reference_power);
std::vector<double> linear_to_dbmv(std::span<const double> values_linear,
                                   double reference_power);

}  // namespace hetcal
