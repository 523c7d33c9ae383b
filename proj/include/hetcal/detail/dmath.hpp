// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>

// Scalar exp2/log2 cores shared by the kernel lanes. The AVX2 lane mirrors
// these operation-for-operation (same polynomials, same FMA placement, same
// rounding points), so a value computed on either lane is bit-identical.
// That keeps simulator output independent of the dispatch decision.
//
// Contract: exp2_core saturates to +inf for x >= 1023 and flushes to 0 for
// x <= -1021 (no subnormal results); log2_core accepts any finite positive
// input including subnormals.
//
// Accuracy: a few ulp against libm (checked in the kernel tests), far inside
// the 1e-12 round-trip budget of the dB conversions built on top.

namespace hetcal::kernels::detail {

inline constexpr double kQuietNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Rational approximation of 2^r on [-0.5, 0.5] (Cephes exp2 coefficients).
inline constexpr double kExp2P0 = 2.30933477057345225087e-2;
inline constexpr double kExp2P1 = 2.02020656693165307700e1;
inline constexpr double kExp2P2 = 1.51390680115615096133e3;
inline constexpr double kExp2Q0 = 2.33184211722314911771e2;
inline constexpr double kExp2Q1 = 4.36821166879210612817e3;

// 2*atanh(t) series coefficients 2/(2k+1), k = 0..9.
inline constexpr double kAtanh[10] = {
    2.0,
    2.0 / 3.0,
    2.0 / 5.0,
    2.0 / 7.0,
    2.0 / 9.0,
    2.0 / 11.0,
    2.0 / 13.0,
    2.0 / 15.0,
    2.0 / 17.0,
    2.0 / 19.0,
};

inline constexpr double kLog2E = 1.4426950408889634074;
// Nearest double to sqrt(2); mantissas above it are halved so the
// series argument stays within |t| <= 0.1716.
inline constexpr double kSqrt2 = 1.4142135623730951;

inline constexpr double kExp2Hi = 1023.0;
inline constexpr double kExp2Lo = -1021.0;

inline double exp2_core(double x) {
  if (std::isnan(x)) return x;
  if (x >= kExp2Hi) return kInf;
  if (x <= kExp2Lo) return 0.0;
  const double n = std::nearbyint(x);
  const double r = x - n;  // exact, |r| <= 0.5
  const double r2 = r * r;
  const double px = r * std::fma(std::fma(kExp2P0, r2, kExp2P1), r2, kExp2P2);
  const double qx = std::fma(r2 + kExp2Q0, r2, kExp2Q1);
  const double y = 1.0 + 2.0 * (px / (qx - px));
  const auto ni = static_cast<std::int64_t>(n);
  const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(ni + 1023) << 52);
  return y * scale;
}

inline double log2_core(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return kQuietNaN;
  if (x == 0.0) return -kInf;
  if (std::isinf(x)) return x;
  double extra = 0.0;
  if (x < DBL_MIN) {  // rescale subnormals
    x *= 0x1.0p54;
    extra = -54.0;
  }
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  auto e = static_cast<double>(static_cast<std::int64_t>((bits >> 52) & 0x7FF) - 1023);
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  if (m > kSqrt2) {
    m *= 0.5;
    e += 1.0;
  }
  const double t = (m - 1.0) / (m + 1.0);
  const double t2 = t * t;
  double s = kAtanh[9];
  s = std::fma(s, t2, kAtanh[8]);
  s = std::fma(s, t2, kAtanh[7]);
  s = std::fma(s, t2, kAtanh[6]);
  s = std::fma(s, t2, kAtanh[5]);
  s = std::fma(s, t2, kAtanh[4]);
  s = std::fma(s, t2, kAtanh[3]);
  s = std::fma(s, t2, kAtanh[2]);
  s = std::fma(s, t2, kAtanh[1]);
  s = std::fma(s, t2, kAtanh[0]);
  const double ln_m = t * s;
  return (e + extra) + ln_m * kLog2E;
}

}  // namespace hetcal::kernels::detail
