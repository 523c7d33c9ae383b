// SPDX-License-Identifier: Apache-2.0
#include <span>

#include "hetcal/detail/kernel_elems.hpp"
#include "hetcal/kernels.hpp"

namespace hetcal::kernels {
namespace {

namespace kd = detail;

void linear_from_dbmv_scalar(std::span<const double> dbmv, double reference_power,
                             std::span<double> out) {
  for (std::size_t i = 0; i < dbmv.size(); ++i) {
    out[i] = kd::linear_from_dbmv_elem(dbmv[i], reference_power);
  }
}

void dbmv_from_linear_scalar(std::span<const double> linear, double reference_power,
                             double floor_power, std::span<double> out) {
  for (std::size_t i = 0; i < linear.size(); ++i) {
    out[i] = kd::dbmv_from_linear_elem(linear[i], reference_power, floor_power);
  }
}

void subtract_clamped_scalar(std::span<const double> a, std::span<const double> b,
                             double floor_value, std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = kd::subtract_clamped_elem(a[i], b[i], floor_value);
  }
}

void add_scaled_scalar(std::span<const double> base, std::span<const double> shape,
                       double scale, std::span<double> out) {
  for (std::size_t i = 0; i < base.size(); ++i) {
    out[i] = kd::add_scaled_elem(base[i], shape[i], scale);
  }
}

void supergaussian_response_scalar(std::span<const double> freq_hz, double center_hz,
                                   double rbw_hz, double order, std::span<double> out) {
  const double inv_half_rbw = 2.0 / rbw_hz;
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    out[i] = kd::supergaussian_response_elem(freq_hz[i], center_hz, inv_half_rbw, order);
  }
}

void rectangular_response_scalar(std::span<const double> freq_hz, double center_hz,
                                 double rbw_hz, std::span<double> out) {
  const double half_width = 0.5 * rbw_hz;
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    out[i] = kd::rectangular_response_elem(freq_hz[i], center_hz, half_width);
  }
}

double sum_scalar(std::span<const double> v) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    acc0 += v[i];
    acc1 += v[i + 1];
    acc2 += v[i + 2];
    acc3 += v[i + 3];
  }
  double acc[4] = {acc0, acc1, acc2, acc3};
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += v[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

const Table& scalar_table() {
  static const Table table{
      &linear_from_dbmv_scalar,      &dbmv_from_linear_scalar,
      &subtract_clamped_scalar,      &add_scaled_scalar,
      &supergaussian_response_scalar, &rectangular_response_scalar,
      &sum_scalar,
  };
  return table;
}

}  // namespace hetcal::kernels
