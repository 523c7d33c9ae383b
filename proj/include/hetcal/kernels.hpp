// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Array kernels for the per-bin trace arithmetic: dB conversions, background
// subtraction, filter response evaluation and reductions. A scalar reference
// lane and an AVX2 lane implement identical arithmetic (see detail/dmath.hpp);
// the active lane is picked once at runtime from CPU features, overridable
// with HETCAL_KERNELS=scalar|avx2.

namespace hetcal::kernels {

enum class Lane { scalar, avx2 };

struct Table {
  // out = reference * 2^(dbmv * log2(10)/10)
  void (*linear_from_dbmv)(std::span<const double> dbmv, double reference_power,
                           std::span<double> out);
  // out = 10*log10(max(linear, floor)/reference)
  void (*dbmv_from_linear)(std::span<const double> linear, double reference_power,
                           double floor_power, std::span<double> out);
  // out = max(a - b, floor)
  void (*subtract_clamped)(std::span<const double> a, std::span<const double> b,
                           double floor_value, std::span<double> out);
  // out = base + scale * shape
  void (*add_scaled)(std::span<const double> base, std::span<const double> shape,
                     double scale, std::span<double> out);
  // out = 2^(-((2*(f-center)/rbw)^2)^order); order == 1 uses the direct path
  void (*supergaussian_response)(std::span<const double> freq_hz, double center_hz,
                                 double rbw_hz, double order, std::span<double> out);
  // 1 inside +-rbw/2, 0.5 on the edge, 0 outside
  void (*rectangular_response)(std::span<const double> freq_hz, double center_hz,
                               double rbw_hz, std::span<double> out);
  // 4-accumulator blocked sum; both lanes combine as (a0+a1)+(a2+a3)
  double (*sum)(std::span<const double> v);
};

const Table& scalar_table();
const Table* avx2_table();  // nullptr when not compiled in or unsupported
const Table& active_table();
Lane active_lane();
std::string_view lane_name(Lane lane);

void linear_from_dbmv(std::span<const double> dbmv, double reference_power,
                      std::span<double> out);
void dbmv_from_linear(std::span<const double> linear, double reference_power,
                      double floor_power, std::span<double> out);
void subtract_clamped(std::span<const double> a, std::span<const double> b,
                      double floor_value, std::span<double> out);
void add_scaled(std::span<const double> base, std::span<const double> shape, double scale,
                std::span<double> out);
void supergaussian_response(std::span<const double> freq_hz, double center_hz,
                            double rbw_hz, double order, std::span<double> out);
void rectangular_response(std::span<const double> freq_hz, double center_hz,
                          double rbw_hz, std::span<double> out);
double sum(std::span<const double> v);
double mean(std::span<const double> v);
// Integral of uniformly sampled values by the trapezoid rule.
double trapezoid_uniform(std::span<const double> v, double spacing);

}  // namespace hetcal::kernels
