// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "hetcal/errors.hpp"
#include "hetcal/receiver.hpp"

using namespace hetcal;

namespace {

// Independent oracle for the mode overlap: 2-D trapezoid integration of the
// normalized field product over a wide window.
double overlap_integral_oracle(const GaussianBeam& a, const GaussianBeam& b) {
  auto field = [](const GaussianBeam& g, double x, double y) {
    const double dx = x - g.lateral_offset_m;
    const double r2 = dx * dx + y * y;
    const double w2 = g.waist_m * g.waist_m;
    return std::sqrt(2.0 / std::numbers::pi) / g.waist_m * std::exp(-r2 / w2);
  };
  const double w = std::max(a.waist_m, b.waist_m);
  const double off = std::max(a.lateral_offset_m, b.lateral_offset_m);
  const double lim = 8.0 * w + off;
  const int n = 1201;
  const double h = 2.0 * lim / (n - 1);
  double gamma = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -lim + i * h;
    const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double y = -lim + j * h;
      const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      row += wy * field(a, x, y) * field(b, x, y);
    }
    gamma += wx * row;
  }
  gamma *= h * h;
  return gamma * gamma;
}

ReceiverParams random_receiver(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u01(0.05, 1.0);
  std::uniform_real_distribution<double> imb(-0.4, 0.4);
  ReceiverParams rx;
  rx.delta_tau = imb(eng);
  rx.tau_alpha = u01(eng);
  rx.tau_beta = u01(eng);
  rx.eta1 = u01(eng);
  rx.eta2 = u01(eng);
  rx.eta_mm = u01(eng);
  rx.noise_factor = 1.0 + 0.5 * u01(eng);
  return rx;
}

}  // namespace

TEST_CASE("lumped efficiency: identity, direct product, free-space chain") {
  ReceiverParams ideal;
  CHECK(lumped_efficiency(ideal) == 1.0);

  ReceiverParams rx{.delta_tau = 0.05, .tau_alpha = 0.98, .eta1 = 0.7, .eta2 = 0.8,
                    .eta_mm = 0.95};
  // (1 - 4*0.0025) * 0.98 * 0.75 * 0.95
  CHECK(lumped_efficiency(rx) == doctest::Approx(0.6912675).epsilon(1e-12));
  CHECK(lumped_efficiency(rx) == doctest::Approx(0.69127).epsilon(1e-4));

  // free-space chain with lumped value 0.345
  ReceiverParams chain{.tau_alpha = 0.5, .eta1 = 0.75, .eta2 = 0.75, .eta_mm = 0.92};
  CHECK(lumped_efficiency(chain) == doctest::Approx(0.345).epsilon(1e-12));
}

TEST_CASE("shot-noise variance density") {
  FieldParams f;
  f.photon_flux_lo = 1e6;

  ReceiverParams rx{.eta1 = 0.8, .eta2 = 0.8};
  CHECK(shot_noise_variance_density(rx, f) == doctest::Approx(8e5).epsilon(1e-12));

  ReceiverParams rx2{.delta_tau = 0.05, .eta1 = 0.8, .eta2 = 0.7};
  FieldParams f1;
  f1.photon_flux_lo = 1.0;
  const double v = shot_noise_variance_density(rx2, f1);
  CHECK(v == doctest::Approx(0.755).epsilon(1e-12));
  CHECK((v - 0.75) / 0.75 == doctest::Approx(0.0066667).epsilon(1e-3));

  ReceiverParams rx3 = rx2;
  rx3.noise_factor = 2.0;
  CHECK(shot_noise_variance_density(rx3, f1) == doctest::Approx(2.0 * v).epsilon(1e-12));
}

TEST_CASE("beat power: unit receiver, fully unbalanced, cosine-amplitude route") {
  FieldParams f;
  f.photon_flux_signal = 1.0;
  f.photon_flux_lo = 1e6;
  ReceiverParams unit;
  CHECK(beat_power_rms(unit, f) == doctest::Approx(2e6).epsilon(1e-12));

  ReceiverParams unbalanced{.delta_tau = 0.5};
  CHECK(beat_power_rms(unbalanced, f) == 0.0);

  // RMS^2 of A*cos equals A^2/2 with A the beat amplitude.
  std::mt19937_64 eng(7);
  for (int i = 0; i < 50; ++i) {
    ReceiverParams rx = random_receiver(eng);
    FieldParams ff;
    ff.photon_flux_signal = 3.2e4;
    ff.photon_flux_lo = 5.5e9;
    const double amp =
        4.0 * rx.k_conv * rx.gain *
        std::sqrt((0.25 - rx.delta_tau * rx.delta_tau) * rx.tau_alpha * rx.tau_beta *
                  rx.eta_mm) *
        rx.eta_av() * std::sqrt(ff.photon_flux_signal * ff.photon_flux_lo);
    CHECK(beat_power_rms(rx, ff) == doctest::Approx(0.5 * amp * amp).epsilon(1e-12));
  }
}

TEST_CASE("beat/shot ratio reproduces the lumped efficiency") {
  FieldParams f;
  f.photon_flux_signal = 2.0e5;
  f.photon_flux_lo = 1.0e9;

  SUBCASE("exact when F = 1 and the cross term vanishes") {
    ReceiverParams rx{.delta_tau = 0.12, .tau_alpha = 0.83, .tau_beta = 0.9,
                      .eta1 = 0.77, .eta2 = 0.77, .eta_mm = 0.88, .k_conv = 2.0,
                      .gain = 11.0};
    const double ratio = beat_power_rms(rx, f) /
                         (2.0 * shot_noise_variance_density(rx, f) * f.photon_flux_signal);
    CHECK(ratio == doctest::Approx(lumped_efficiency(rx)).epsilon(1e-12));
  }

  SUBCASE("relative deviation is -de*dt/(eta_av + de*dt), below 1% in range") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> eta(0.5, 1.0);
    std::uniform_real_distribution<double> dt(-0.05, 0.05);
    std::uniform_real_distribution<double> de(-0.1, 0.1);
    for (int i = 0; i < 200; ++i) {
      ReceiverParams rx;
      rx.eta1 = eta(eng);
      rx.eta2 = std::clamp(rx.eta1 + de(eng), 0.5, 1.0);
      rx.delta_tau = dt(eng);
      rx.tau_alpha = 0.95;
      rx.tau_beta = 0.97;
      rx.eta_mm = 0.9;
      const double ratio =
          beat_power_rms(rx, f) /
          (2.0 * shot_noise_variance_density(rx, f) * f.photon_flux_signal);
      const double dev = ratio / lumped_efficiency(rx) - 1.0;
      const double cross = rx.delta_eta() * rx.delta_tau;
      const double expected = -cross / (rx.eta_av() + cross);
      CHECK(dev == doctest::Approx(expected).epsilon(1e-9));
      CHECK(std::abs(dev) < 0.01);
    }
  }
}

TEST_CASE("linearity of the spectral quantities") {
  std::mt19937_64 eng(13);
  ReceiverParams rx = random_receiver(eng);
  FieldParams f;
  f.photon_flux_signal = 1e4;
  f.photon_flux_lo = 1e8;

  FieldParams f2 = f;
  f2.photon_flux_lo *= 3.5;
  CHECK(shot_noise_variance_density(rx, f2) ==
        doctest::Approx(3.5 * shot_noise_variance_density(rx, f)).epsilon(1e-12));
  CHECK(beat_power_rms(rx, f2) ==
        doctest::Approx(3.5 * beat_power_rms(rx, f)).epsilon(1e-12));

  FieldParams f3 = f;
  f3.photon_flux_signal *= 7.0;
  CHECK(beat_power_rms(rx, f3) ==
        doctest::Approx(7.0 * beat_power_rms(rx, f)).epsilon(1e-12));
  CHECK(shot_noise_variance_density(rx, f3) ==
        doctest::Approx(shot_noise_variance_density(rx, f)).epsilon(1e-12));

  ReceiverParams rxf = rx;
  rxf.noise_factor *= 1.7;
  CHECK(shot_noise_variance_density(rxf, f) ==
        doctest::Approx(1.7 * shot_noise_variance_density(rx, f)).epsilon(1e-12));
}

TEST_CASE("lumped efficiency monotonicity") {
  std::mt19937_64 eng(17);
  for (int i = 0; i < 100; ++i) {
    ReceiverParams rx = random_receiver(eng);
    const double base = lumped_efficiency(rx);

    ReceiverParams up = rx;
    up.tau_alpha = std::min(1.0, rx.tau_alpha * 1.05);
    CHECK(lumped_efficiency(up) >= base);
    up = rx;
    up.eta1 = std::min(1.0, rx.eta1 + 0.03);
    CHECK(lumped_efficiency(up) >= base);
    up = rx;
    up.eta2 = std::min(1.0, rx.eta2 + 0.03);
    CHECK(lumped_efficiency(up) >= base);
    up = rx;
    up.eta_mm = std::min(1.0, rx.eta_mm + 0.03);
    CHECK(lumped_efficiency(up) >= base);
    up = rx;
    up.delta_tau = std::clamp(std::abs(rx.delta_tau) + 0.02, 0.0, 0.5);
    CHECK(lumped_efficiency(up) <= base + 1e-15);
  }
}

TEST_CASE("gaussian mode overlap against the 2-D integral oracle") {
  GaussianBeam a{.waist_m = 1e-3};
  CHECK(gaussian_mode_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  GaussianBeam b{.waist_m = 2e-3};
  CHECK(gaussian_mode_overlap(a, b) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(gaussian_mode_overlap(a, b) ==
        doctest::Approx(overlap_integral_oracle(a, b)).epsilon(1e-6));

  GaussianBeam c{.waist_m = 1e-3, .lateral_offset_m = 1e-3};
  CHECK(gaussian_mode_overlap(a, c) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(gaussian_mode_overlap(a, c) ==
        doctest::Approx(overlap_integral_oracle(a, c)).epsilon(1e-6));

  GaussianBeam d{.waist_m = 1.7e-3, .lateral_offset_m = 0.4e-3};
  CHECK(gaussian_mode_overlap(a, d) ==
        doctest::Approx(overlap_integral_oracle(a, d)).epsilon(1e-6));
}

TEST_CASE("mode overlap is symmetric, bounded, and 1 only for identical beams") {
  std::mt19937_64 eng(19);
  std::uniform_real_distribution<double> wd(0.5e-3, 3e-3);
  std::uniform_real_distribution<double> od(0.0, 2e-3);
  for (int i = 0; i < 200; ++i) {
    GaussianBeam a{wd(eng), od(eng)};
    GaussianBeam b{wd(eng), od(eng)};
    const double ab = gaussian_mode_overlap(a, b);
    CHECK(ab == gaussian_mode_overlap(b, a));
    CHECK(ab <= 1.0);
    if (std::abs(a.waist_m - b.waist_m) > 1e-5 ||
        std::abs(a.lateral_offset_m - b.lateral_offset_m) > 1e-5) {
      CHECK(ab < 1.0);
    }
  }
}

TEST_CASE("channel attenuation") {
  FieldParams f;
  f.photon_flux_signal = 1e6;
  f.photon_flux_lo = 1e9;

  CHECK(apply_attenuation(f, ChannelParams{{1.0}}).photon_flux_signal == 1e6);
  CHECK(apply_attenuation(f, ChannelParams{{0.5}}).photon_flux_signal ==
        doctest::Approx(5e5).epsilon(1e-15));

  const FieldParams two = apply_attenuation(f, ChannelParams{{0.5, 0.2}});
  const FieldParams one = apply_attenuation(f, ChannelParams{{0.1}});
  CHECK(two.photon_flux_signal == doctest::Approx(one.photon_flux_signal).epsilon(1e-15));
  CHECK(two.photon_flux_lo == f.photon_flux_lo);

  // composition equals the product to machine precision
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> td(0.01, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t1 = td(eng), t2 = td(eng);
    const FieldParams seq =
        apply_attenuation(apply_attenuation(f, ChannelParams{{t1}}), ChannelParams{{t2}});
    const FieldParams prod = apply_attenuation(f, ChannelParams{{t1 * t2}});
    CHECK(seq.photon_flux_signal ==
          doctest::Approx(prod.photon_flux_signal).epsilon(1e-15));
  }
}

TEST_CASE("parameter invariants are enforced") {
  ReceiverParams rx;
  rx.delta_tau = 0.6;
  CHECK_THROWS_AS(validate(rx), InvariantError);
  rx = ReceiverParams{};
  rx.noise_factor = 0.9;
  CHECK_THROWS_AS(validate(rx), InvariantError);
  rx = ReceiverParams{};
  rx.eta1 = 0.0;
  CHECK_THROWS_AS(validate(rx), InvariantError);

  FieldParams f;
  f.photon_flux_lo = 1e9;
  f.photon_flux_signal = 1e7;  // ratio 1e-2, above the default limit
  CHECK_THROWS_AS(validate(f), InvariantError);
  CHECK_NOTHROW(validate(f, 0.1));

  ChannelParams ch{{0.5, 1.5}};
  CHECK_THROWS_AS(validate(ch), InvariantError);

  GaussianBeam beam{.waist_m = 0.0};
  CHECK_THROWS_AS(validate(beam), InvariantError);
}
