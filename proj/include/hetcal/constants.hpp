// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>

namespace hetcal {

// Exact SI values (2019 redefinition); kept in one place so every module
// converts power <-> photon flux with the same numbers.
inline constexpr double kReducedPlanckJs = 1.054571817e-34;
inline constexpr double kSpeedOfLightMps = 2.99792458e8;

inline constexpr double kLn2 = 0.69314718055994530942;
// log2(10) and 10*log10(2); the dB conversions are built on exp2/log2.
inline constexpr double kLog2Of10 = 3.3219280948873623479;
inline constexpr double kTenLog10Of2 = 3.0102999566398119521;

inline double angular_frequency_rad_s(double wavelength_m) {
  return 2.0 * std::numbers::pi * kSpeedOfLightMps / wavelength_m;
}

inline double photon_energy_j(double wavelength_m) {
  return kReducedPlanckJs * angular_frequency_rad_s(wavelength_m);
}

}  // namespace hetcal
