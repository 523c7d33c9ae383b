// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "hetcal/constants.hpp"
#include "hetcal/detail/dmath.hpp"

// Per-element bodies of the array kernels. The scalar lane loops over these;
// the AVX2 lane uses them for remainder elements so tails match the vector
// body bit for bit.

namespace hetcal::kernels::detail {

inline constexpr double kDbmvToExp2 = kLog2Of10 / 10.0;

inline double linear_from_dbmv_elem(double dbmv, double reference_power) {
  return reference_power * exp2_core(dbmv * kDbmvToExp2);
}

inline double dbmv_from_linear_elem(double linear, double reference_power,
                                    double floor_power) {
  const double clamped = (linear > floor_power) ? linear : floor_power;
  return log2_core(clamped / reference_power) * kTenLog10Of2;
}

inline double subtract_clamped_elem(double a, double b, double floor_value) {
  const double d = a - b;
  return (d > floor_value) ? d : floor_value;
}

inline double add_scaled_elem(double base, double shape, double scale) {
  return std::fma(scale, shape, base);
}

// inv_half_rbw = 2/rbw, precomputed once per call so both lanes share the
// same rounding of the reciprocal width.
inline double supergaussian_response_elem(double freq, double center, double inv_half_rbw,
                                          double order) {
  const double z = (freq - center) * inv_half_rbw;
  const double u = z * z;
  if (order == 1.0) return exp2_core(-u);
  if (u == 0.0) return 1.0;
  const double powered = exp2_core(order * log2_core(u));
  return exp2_core(-powered);
}

inline double rectangular_response_elem(double freq, double center, double half_width) {
  const double af = std::fabs(freq - center);
  if (af < half_width) return 1.0;
  return (af == half_width) ? 0.5 : 0.0;
}

}  // namespace hetcal::kernels::detail
