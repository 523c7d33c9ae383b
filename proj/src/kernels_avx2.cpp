// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel lane. Mirrors the scalar element cores operation for
// operation (same polynomials, same FMA placement, same compare/blend
// precedence), so results are bit-identical to the scalar lane and the
// equivalence tests can assert exact equality. Remainder elements go
// through the shared scalar cores.

#include <immintrin.h>

#include <cfloat>
#include <span>

#include "hetcal/detail/kernel_elems.hpp"
#include "hetcal/kernels.hpp"

namespace hetcal::kernels {
namespace {

namespace kd = detail;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline __m256d v_negate(__m256d v) {
  return _mm256_xor_pd(v, set1(-0.0));
}

inline __m256d v_exp2(__m256d x) {
  const __m256d hi = set1(kd::kExp2Hi);
  const __m256d lo = set1(kd::kExp2Lo);
  const __m256d nan_mask = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const __m256d inf_mask = _mm256_cmp_pd(x, hi, _CMP_GE_OQ);
  const __m256d zero_mask = _mm256_cmp_pd(x, lo, _CMP_LE_OQ);
  const __m256d xc = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

  const __m256d n = _mm256_round_pd(xc, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(xc, n);
  const __m256d r2 = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(set1(kd::kExp2P0), r2, set1(kd::kExp2P1));
  px = _mm256_fmadd_pd(px, r2, set1(kd::kExp2P2));
  px = _mm256_mul_pd(r, px);
  const __m256d qx = _mm256_fmadd_pd(_mm256_add_pd(r2, set1(kd::kExp2Q0)), r2,
                                     set1(kd::kExp2Q1));
  __m256d y = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  y = _mm256_add_pd(set1(1.0), _mm256_add_pd(y, y));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i biased = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));

  __m256d res = _mm256_mul_pd(y, scale);
  res = _mm256_blendv_pd(res, set1(kd::kInf), inf_mask);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), zero_mask);
  res = _mm256_blendv_pd(res, x, nan_mask);
  return res;
}

inline __m256d v_log2(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = set1(1.0);
  const __m256d nan_in = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const __m256d neg_mask = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
  const __m256d zero_mask = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d inf_mask = _mm256_cmp_pd(x, set1(kd::kInf), _CMP_EQ_OQ);

  const __m256d sub_mask = _mm256_cmp_pd(x, set1(DBL_MIN), _CMP_LT_OQ);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(0x1.0p54)), sub_mask);
  const __m256d extra = _mm256_and_pd(sub_mask, set1(-54.0));

  const __m256i bits = _mm256_castpd_si256(xs);
  const __m256i e_raw =
      _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7FF));
  const __m256i e_int = _mm256_sub_epi64(e_raw, _mm256_set1_epi64x(1023));
  // small-int64 -> double via the 1.5*2^52 bias trick
  const __m256i e_biased =
      _mm256_add_epi64(e_int, _mm256_set1_epi64x(0x4338000000000000LL));
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(e_biased), set1(6755399441055744.0));

  const __m256i mant_bits =
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);
  const __m256d gt = _mm256_cmp_pd(m, set1(kd::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), gt);
  e = _mm256_add_pd(e, _mm256_and_pd(gt, one));

  const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d t2 = _mm256_mul_pd(t, t);
  __m256d s = set1(kd::kAtanh[9]);
  for (int k = 8; k >= 0; --k) s = _mm256_fmadd_pd(s, t2, set1(kd::kAtanh[k]));
  const __m256d ln_m = _mm256_mul_pd(t, s);

  __m256d res =
      _mm256_add_pd(_mm256_add_pd(e, extra), _mm256_mul_pd(ln_m, set1(kd::kLog2E)));
  res = _mm256_blendv_pd(res, set1(kd::kQuietNaN), neg_mask);
  res = _mm256_blendv_pd(res, set1(-kd::kInf), zero_mask);
  res = _mm256_blendv_pd(res, set1(kd::kInf), inf_mask);
  res = _mm256_blendv_pd(res, x, nan_in);
  return res;
}

void linear_from_dbmv_avx2(std::span<const double> dbmv, double reference_power,
                           std::span<double> out) {
  const __m256d ref = set1(reference_power);
  const __m256d k = set1(kd::kDbmvToExp2);
  std::size_t i = 0;
  const std::size_t n = dbmv.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(&dbmv[i]);
    const __m256d e = v_exp2(_mm256_mul_pd(d, k));
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(ref, e));
  }
  for (; i < n; ++i) out[i] = kd::linear_from_dbmv_elem(dbmv[i], reference_power);
}

void dbmv_from_linear_avx2(std::span<const double> linear, double reference_power,
                           double floor_power, std::span<double> out) {
  const __m256d ref = set1(reference_power);
  const __m256d floorv = set1(floor_power);
  const __m256d k = set1(kTenLog10Of2);
  std::size_t i = 0;
  const std::size_t n = linear.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(&linear[i]);
    const __m256d clamped = _mm256_max_pd(x, floorv);
    const __m256d l = v_log2(_mm256_div_pd(clamped, ref));
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(l, k));
  }
  for (; i < n; ++i) {
    out[i] = kd::dbmv_from_linear_elem(linear[i], reference_power, floor_power);
  }
}

void subtract_clamped_avx2(std::span<const double> a, std::span<const double> b,
                           double floor_value, std::span<double> out) {
  const __m256d floorv = set1(floor_value);
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]));
    _mm256_storeu_pd(&out[i], _mm256_max_pd(d, floorv));
  }
  for (; i < n; ++i) out[i] = kd::subtract_clamped_elem(a[i], b[i], floor_value);
}

void add_scaled_avx2(std::span<const double> base, std::span<const double> shape,
                     double scale, std::span<double> out) {
  const __m256d s = set1(scale);
  std::size_t i = 0;
  const std::size_t n = base.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(s, _mm256_loadu_pd(&shape[i]), _mm256_loadu_pd(&base[i]));
    _mm256_storeu_pd(&out[i], r);
  }
  for (; i < n; ++i) out[i] = kd::add_scaled_elem(base[i], shape[i], scale);
}

void supergaussian_response_avx2(std::span<const double> freq_hz, double center_hz,
                                 double rbw_hz, double order, std::span<double> out) {
  const double inv_half_rbw = 2.0 / rbw_hz;
  const __m256d c = set1(center_hz);
  const __m256d w = set1(inv_half_rbw);
  const __m256d one = set1(1.0);
  const __m256d ord = set1(order);
  const bool plain_gaussian = (order == 1.0);
  std::size_t i = 0;
  const std::size_t n = freq_hz.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(&freq_hz[i]), c), w);
    const __m256d u = _mm256_mul_pd(z, z);
    __m256d resp;
    if (plain_gaussian) {
      resp = v_exp2(v_negate(u));
    } else {
      const __m256d zero_mask = _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_EQ_OQ);
      const __m256d powered = v_exp2(_mm256_mul_pd(ord, v_log2(u)));
      resp = v_exp2(v_negate(powered));
      resp = _mm256_blendv_pd(resp, one, zero_mask);
    }
    _mm256_storeu_pd(&out[i], resp);
  }
  for (; i < n; ++i) {
    out[i] = kd::supergaussian_response_elem(freq_hz[i], center_hz, inv_half_rbw, order);
  }
}

void rectangular_response_avx2(std::span<const double> freq_hz, double center_hz,
                               double rbw_hz, std::span<double> out) {
  const double half_width = 0.5 * rbw_hz;
  const __m256d c = set1(center_hz);
  const __m256d half = set1(half_width);
  const __m256d one = set1(1.0);
  const __m256d edge = set1(0.5);
  const __m256d signmask = set1(-0.0);
  std::size_t i = 0;
  const std::size_t n = freq_hz.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d af =
        _mm256_andnot_pd(signmask, _mm256_sub_pd(_mm256_loadu_pd(&freq_hz[i]), c));
    const __m256d lt = _mm256_cmp_pd(af, half, _CMP_LT_OQ);
    const __m256d eq = _mm256_cmp_pd(af, half, _CMP_EQ_OQ);
    const __m256d resp =
        _mm256_or_pd(_mm256_and_pd(lt, one), _mm256_and_pd(eq, edge));
    _mm256_storeu_pd(&out[i], resp);
  }
  for (; i < n; ++i) {
    out[i] = kd::rectangular_response_elem(freq_hz[i], center_hz, half_width);
  }
}

double sum_avx2(std::span<const double> v) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(&v[i]));
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (std::size_t j = 0; i < n; ++i, ++j) a[j] += v[i];
  return (a[0] + a[1]) + (a[2] + a[3]);
}

}  // namespace

const Table* avx2_table_impl() {
  static const Table table{
      &linear_from_dbmv_avx2,      &dbmv_from_linear_avx2,
      &subtract_clamped_avx2,      &add_scaled_avx2,
      &supergaussian_response_avx2, &rectangular_response_avx2,
      &sum_avx2,
  };
  return &table;
}

}  // namespace hetcal::kernels
