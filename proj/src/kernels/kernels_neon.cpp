// NEON variant (aarch64). Two float64x2_t registers emulate the canonical
// four virtual lanes; operation order mirrors the scalar reference exactly,
// so results stay bit-identical.

#include <arm_neon.h>

#include "kernels_isa.hpp"

#ifdef LOT_HAVE_NEON_TU

namespace lot::kernels {

namespace {

float64x2_t ell2d_lane(float64x2_t vxt, float64x2_t vxx, float64x2_t vyt,
                       float64x2_t vyx, float64x2_t one, float64x2_t eps,
                       float64x2_t zero, float64x2_t ninf) {
  const float64x2_t dt = vsubq_f64(vyt, vxt);
  const float64x2_t dx = vsubq_f64(vyx, vxx);
  const float64x2_t adt = vabsq_f64(dt);
  const float64x2_t adx = vabsq_f64(dx);
  const float64x2_t band =
      vmulq_f64(eps, vmaxq_f64(vmaxq_f64(one, adt), adx));
  const uint64x2_t causal = vcgeq_f64(dt, vsubq_f64(adx, band));
  const float64x2_t q = vsubq_f64(vmulq_f64(dt, dt), vmulq_f64(dx, dx));
  const float64x2_t l = vsqrtq_f64(vmaxq_f64(q, zero));
  return vbslq_f64(causal, l, ninf);
}

void ell2d_neon(const double* xt, const double* xx, double yt, double yx,
                double* out, std::size_t n) {
  const float64x2_t vyt = vdupq_n_f64(yt);
  const float64x2_t vyx = vdupq_n_f64(yx);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t eps = vdupq_n_f64(1e-12);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t ninf =
      vdupq_n_f64(-std::numeric_limits<double>::infinity());

  const std::size_t n2 = n - n % 2;
  for (std::size_t i = 0; i < n2; i += 2) {
    const float64x2_t r = ell2d_lane(vld1q_f64(xt + i), vld1q_f64(xx + i), vyt,
                                     vyx, one, eps, zero, ninf);
    vst1q_f64(out + i, r);
  }
  for (std::size_t i = n2; i < n; ++i) out[i] = ell2d_one(xt[i], xx[i], yt, yx);
}

double combine(float64x2_t acc01, float64x2_t acc23) {
  const float64x2_t s2 = vaddq_f64(acc01, acc23);  // (a0+a2, a1+a3)
  return vgetq_lane_f64(s2, 0) + vgetq_lane_f64(s2, 1);
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
    acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
  }
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail += x[i];
  return combine(acc01, acc23) + tail;
}

double dot_neon(const double* w, const double* x, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc01 = vfmaq_f64(acc01, vld1q_f64(w + i), vld1q_f64(x + i));
    acc23 = vfmaq_f64(acc23, vld1q_f64(w + i + 2), vld1q_f64(x + i + 2));
  }
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail = std::fma(w[i], x[i], tail);
  return combine(acc01, acc23) + tail;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{"neon", ell2d_neon, sum_neon, dot_neon};
  return table;
}

}  // namespace lot::kernels

#endif  // LOT_HAVE_NEON_TU
