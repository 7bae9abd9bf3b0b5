#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace lot::kernels {

// Batched arithmetic inner loops with one canonical operation order shared by
// the scalar reference and every SIMD variant, so all paths produce
// bit-identical results (sub/mul/max/sqrt/fma are IEEE-exact per lane and the
// reduction tree is fixed). Variants are selected at runtime by CPU feature
// detection; LOT_SIMD=scalar|avx2|neon|auto overrides.

// Canonical single-pair 1+1 Minkowski time separation. -inf when not future
// causal; the light-cone band classifies borderline pairs as causal with l=0.
inline double ell2d_one(double xt, double xx, double yt, double yx) {
  const double dt = yt - xt;
  const double dx = yx - xx;
  const double adx = std::fabs(dx);
  const double band = 1e-12 * std::fmax(std::fmax(1.0, std::fabs(dt)), adx);
  const bool causal = dt >= adx - band;
  const double q = dt * dt - dx * dx;
  const double l = std::sqrt(std::fmax(q, 0.0));
  return causal ? l : -std::numeric_limits<double>::infinity();
}

struct KernelTable {
  const char* name;
  // out[i] = time separation from (xt[i], xx[i]) to (yt, yx).
  void (*ell2d)(const double* xt, const double* xx, double yt, double yx,
                double* out, std::size_t n);
  // Deterministic blocked-pairwise reduction (4 virtual lanes + tail).
  double (*sum)(const double* x, std::size_t n);
  // Same reduction with fused multiply-add terms w[i]*x[i].
  double (*dot)(const double* w, const double* x, std::size_t n);
};

const KernelTable& scalar_table();

// The runtime-selected table (feature detection + LOT_SIMD override).
const KernelTable& active();

// Every table the current machine can actually run (for equivalence tests).
std::vector<const KernelTable*> available_tables();

// Convenience wrappers over active().
inline void ell_batch_2d(const double* xt, const double* xx, double yt,
                         double yx, double* out, std::size_t n) {
  active().ell2d(xt, xx, yt, yx, out, n);
}
inline double pairwise_sum(const double* x, std::size_t n) {
  return active().sum(x, n);
}
inline double pairwise_dot(const double* w, const double* x, std::size_t n) {
  return active().dot(w, x, n);
}
inline double pairwise_sum(const std::vector<double>& x) {
  return active().sum(x.data(), x.size());
}
inline double pairwise_dot(const std::vector<double>& w,
                           const std::vector<double>& x) {
  return active().dot(w.data(), x.data(), x.size());
}

}  // namespace lot::kernels
