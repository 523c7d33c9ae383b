// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "hetcal/kernels.hpp"

namespace hetcal::kernels {

#if HETCAL_HAVE_AVX2
const Table* avx2_table_impl();  // kernels_avx2.cpp
#endif

const Table* avx2_table() {
#if HETCAL_HAVE_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_table_impl();
  }
#endif
  return nullptr;
}

namespace {

struct Selection {
  const Table* table;
  Lane lane;
};

Selection select() {
  const char* env = std::getenv("HETCAL_KERNELS");
  const std::string_view want = env ? env : "";
  if (want != "scalar") {
    if (const Table* t = avx2_table()) return {t, Lane::avx2};
  }
  return {&scalar_table(), Lane::scalar};
}

const Selection& selection() {
  static const Selection s = select();
  return s;
}

}  // namespace

const Table& active_table() { return *selection().table; }
Lane active_lane() { return selection().lane; }

std::string_view lane_name(Lane lane) {
  return lane == Lane::avx2 ? "avx2" : "scalar";
}

void linear_from_dbmv(std::span<const double> dbmv, double reference_power,
                      std::span<double> out) {
  active_table().linear_from_dbmv(dbmv, reference_power, out);
}

void dbmv_from_linear(std::span<const double> linear, double reference_power,
                      double floor_power, std::span<double> out) {
  active_table().dbmv_from_linear(linear, reference_power, floor_power, out);
}

void subtract_clamped(std::span<const double> a, std::span<const double> b,
                      double floor_value, std::span<double> out) {
  active_table().subtract_clamped(a, b, floor_value, out);
}

void add_scaled(std::span<const double> base, std::span<const double> shape, double scale,
                std::span<double> out) {
  active_table().add_scaled(base, shape, scale, out);
}

void supergaussian_response(std::span<const double> freq_hz, double center_hz,
                            double rbw_hz, double order, std::span<double> out) {
  active_table().supergaussian_response(freq_hz, center_hz, rbw_hz, order, out);
}

void rectangular_response(std::span<const double> freq_hz, double center_hz,
                          double rbw_hz, std::span<double> out) {
  active_table().rectangular_response(freq_hz, center_hz, rbw_hz, out);
}

double sum(std::span<const double> v) { return active_table().sum(v); }

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : sum(v) / static_cast<double>(v.size());
}

double trapezoid_uniform(std::span<const double> v, double spacing) {
  if (v.size() < 2) return 0.0;
  const double interior = sum(v) - 0.5 * (v.front() + v.back());
  return spacing * interior;
}

}  // namespace hetcal::kernels
