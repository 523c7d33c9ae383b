// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

// Closed-form model of a lossy, imbalanced balanced heterodyne receiver:
// shot-noise variance density, beat-note mean-square power, the lumped
// detection efficiency bundling imbalance / loss / quantum efficiency /
// mode overlap, and the channel attenuation acting on the signal path.

namespace hetcal {

struct ReceiverParams {
  // Beam-splitter imbalance: power transmission 1/2 + delta_tau toward
  // detector 1, 1/2 - delta_tau toward detector 2.
  double delta_tau = 0.0;
  double tau_alpha = 1.0;  ///< signal-path insertion transmission
  double tau_beta = 1.0;   ///< LO-path insertion transmission
  double eta1 = 1.0;       ///< quantum efficiency, detector 1
  double eta2 = 1.0;       ///< quantum efficiency, detector 2
  double eta_mm = 1.0;     ///< signal/LO mode-overlap power factor
  double k_conv = 1.0;     ///< opto-electronic conversion factor
  double gain = 1.0;       ///< average electronic gain
  double noise_factor = 1.0;  ///< amplifier excess-noise factor, >= 1

  double eta_av() const { return 0.5 * (eta1 + eta2); }
  double delta_eta() const { return eta1 - eta2; }
};

void validate(const ReceiverParams& rx);

struct FieldParams {
  double photon_flux_signal = 0.0;  ///< |alpha|^2, photons/s at the reference plane
  double photon_flux_lo = 0.0;      ///< |beta|^2, photons/s
  double wavelength_m = 1.542e-6;
  double if_hz = 20.0e6;  ///< beat frequency |omega_a - omega_b| / 2pi
};

void validate(const FieldParams& fields, double max_flux_ratio = 1e-3);

struct ChannelParams {
  std::vector<double> transmissions;  ///< per-element power transmissions in (0,1]
  double product() const;
};

void validate(const ChannelParams& ch);

struct GaussianBeam {
  double waist_m = 1.0e-3;         ///< 1/e field radius
  double lateral_offset_m = 0.0;   ///< transverse displacement
};

void validate(const GaussianBeam& beam);

/// (1 - 4*delta_tau^2) * tau_alpha * eta_av * eta_mm
double lumped_efficiency(const ReceiverParams& rx);

/// Shot-noise variance density (output units^2 per Hz) of the LO-only
/// differential photocurrent: K^2 g^2 F tau_beta |beta|^2 (eta_av + d_eta*d_tau).
double shot_noise_variance_density(const ReceiverParams& rx, const FieldParams& fields);

/// Mean-square beat amplitude (total tone power in output units^2):
/// 2 K^2 g^2 (1 - 4*d_tau^2) tau_a tau_b eta_mm eta_av^2 |alpha|^2 |beta|^2.
double beat_power_rms(const ReceiverParams& rx, const FieldParams& fields);

/// |overlap integral|^2 of two coaxial fundamental Gaussian field modes.
double gaussian_mode_overlap(const GaussianBeam& a, const GaussianBeam& b);

/// Scales the signal photon flux by the channel transmission product;
/// the LO flux is unaffected.
FieldParams apply_attenuation(const FieldParams& fields, const ChannelParams& ch);

}  // namespace hetcal
