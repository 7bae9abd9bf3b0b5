// AVX2+FMA variant. Must mirror the scalar reference's operation order
// exactly (see kernels.cpp): every lane op here is IEEE-exact, so results are
// bit-identical to the reference.

#include <immintrin.h>

#include "kernels_isa.hpp"

#ifdef LOT_HAVE_AVX2_TU

namespace lot::kernels {

namespace {

void ell2d_avx2(const double* xt, const double* xx, double yt, double yx,
                double* out, std::size_t n) {
  const __m256d vyt = _mm256_set1_pd(yt);
  const __m256d vyx = _mm256_set1_pd(yx);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d eps = _mm256_set1_pd(1e-12);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d ninf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());

  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d dt = _mm256_sub_pd(vyt, _mm256_loadu_pd(xt + i));
    const __m256d dx = _mm256_sub_pd(vyx, _mm256_loadu_pd(xx + i));
    const __m256d adt = _mm256_andnot_pd(sign, dt);
    const __m256d adx = _mm256_andnot_pd(sign, dx);
    const __m256d band =
        _mm256_mul_pd(eps, _mm256_max_pd(_mm256_max_pd(one, adt), adx));
    const __m256d causal =
        _mm256_cmp_pd(dt, _mm256_sub_pd(adx, band), _CMP_GE_OQ);
    const __m256d q =
        _mm256_sub_pd(_mm256_mul_pd(dt, dt), _mm256_mul_pd(dx, dx));
    const __m256d l = _mm256_sqrt_pd(_mm256_max_pd(q, zero));
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(ninf, l, causal));
  }
  for (std::size_t i = n4; i < n; ++i) out[i] = ell2d_one(xt[i], xx[i], yt, yx);
}

double horizontal(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);       // (a0, a1)
  const __m128d hi = _mm256_extractf128_pd(acc, 1);     // (a2, a3)
  const __m128d s2 = _mm_add_pd(lo, hi);                // (a0+a2, a1+a3)
  return _mm_cvtsd_f64(s2) + _mm_cvtsd_f64(_mm_unpackhi_pd(s2, s2));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail += x[i];
  return horizontal(acc) + tail;
}

double dot_avx2(const double* w, const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc);
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail = std::fma(w[i], x[i], tail);
  return horizontal(acc) + tail;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", ell2d_avx2, sum_avx2, dot_avx2};
  return table;
}

}  // namespace lot::kernels

#endif  // LOT_HAVE_AVX2_TU
