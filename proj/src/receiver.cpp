// SPDX-License-Identifier: Apache-2.0
#include "hetcal/receiver.hpp"

#include <cmath>
#include <string>

#include "hetcal/errors.hpp"

namespace hetcal {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvariantError(message);
}

}  // namespace

void validate(const ReceiverParams& rx) {
  require(std::abs(rx.delta_tau) <= 0.5, "receiver.delta_tau: 4*delta_tau^2 <= 1 required");
  require(rx.tau_alpha > 0.0 && rx.tau_alpha <= 1.0, "receiver.tau_alpha must be in (0, 1]");
  require(rx.tau_beta > 0.0 && rx.tau_beta <= 1.0, "receiver.tau_beta must be in (0, 1]");
  require(rx.eta1 > 0.0 && rx.eta1 <= 1.0, "receiver.eta1 must be in (0, 1]");
  require(rx.eta2 > 0.0 && rx.eta2 <= 1.0, "receiver.eta2 must be in (0, 1]");
  require(rx.eta_mm >= 0.0 && rx.eta_mm <= 1.0, "receiver.eta_mm must be in [0, 1]");
  require(rx.k_conv > 0.0, "receiver.k_conv must be positive");
  require(rx.gain > 0.0, "receiver.gain must be positive");
  require(rx.noise_factor >= 1.0, "receiver.noise_factor must be >= 1");
}

void validate(const FieldParams& fields, double max_flux_ratio) {
  require(fields.photon_flux_signal >= 0.0, "fields.photon_flux_signal must be >= 0");
  require(fields.photon_flux_lo > 0.0, "fields.photon_flux_lo must be positive");
  require(fields.wavelength_m > 0.0, "fields.wavelength_m must be positive");
  require(fields.if_hz > 0.0, "fields.if_hz must be positive");
  require(fields.photon_flux_signal <= max_flux_ratio * fields.photon_flux_lo,
          "fields.photon_flux_signal must be << photon_flux_lo (ratio limit " +
              std::to_string(max_flux_ratio) + " exceeded)");
}

double ChannelParams::product() const {
  double p = 1.0;
  for (double t : transmissions) p *= t;
  return p;
}

void validate(const ChannelParams& ch) {
  for (double t : ch.transmissions) {
    require(t > 0.0 && t <= 1.0, "channel.transmissions entries must be in (0, 1]");
  }
}

void validate(const GaussianBeam& beam) {
  require(beam.waist_m > 0.0, "beam.waist_m must be positive");
  require(beam.lateral_offset_m >= 0.0, "beam.lateral_offset_m must be >= 0");
}

double lumped_efficiency(const ReceiverParams& rx) {
  const double balance = 1.0 - 4.0 * rx.delta_tau * rx.delta_tau;
  return balance * rx.tau_alpha * rx.eta_av() * rx.eta_mm;
}

double shot_noise_variance_density(const ReceiverParams& rx, const FieldParams& fields) {
  const double kg = rx.k_conv * rx.gain;
  const double eff = rx.eta_av() + rx.delta_eta() * rx.delta_tau;
  return kg * kg * rx.noise_factor * rx.tau_beta * fields.photon_flux_lo * eff;
}

double beat_power_rms(const ReceiverParams& rx, const FieldParams& fields) {
  const double kg = rx.k_conv * rx.gain;
  const double balance = 1.0 - 4.0 * rx.delta_tau * rx.delta_tau;
  const double eta_av = rx.eta_av();
  return 2.0 * kg * kg * balance * rx.tau_alpha * rx.tau_beta * rx.eta_mm * eta_av *
         eta_av * fields.photon_flux_signal * fields.photon_flux_lo;
}

double gaussian_mode_overlap(const GaussianBeam& a, const GaussianBeam& b) {
  const double w1 = a.waist_m;
  const double w2 = b.waist_m;
  const double d = a.lateral_offset_m - b.lateral_offset_m;
  const double wsum = w1 * w1 + w2 * w2;
  const double amplitude = 2.0 * w1 * w2 / wsum;
  return amplitude * amplitude * std::exp(-2.0 * d * d / wsum);
}

FieldParams apply_attenuation(const FieldParams& fields, const ChannelParams& ch) {
  FieldParams out = fields;
  out.photon_flux_signal *= ch.product();
  return out;
}

}  // namespace hetcal
