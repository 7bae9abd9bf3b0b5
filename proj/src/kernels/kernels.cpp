#include "lot/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_isa.hpp"

namespace lot::kernels {

namespace {

void ell2d_scalar(const double* xt, const double* xx, double yt, double yx,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ell2d_one(xt[i], xx[i], yt, yx);
}

// Reference reduction. Four independent accumulators emulate one 4-wide SIMD
// register; the final combine (a0+a2)+(a1+a3) matches the vector horizontal
// reduction, and the tail is accumulated separately in both paths, so scalar
// and SIMD results agree bit for bit.
double sum_scalar(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail += x[i];
  return ((a0 + a2) + (a1 + a3)) + tail;
}

double dot_scalar(const double* w, const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    a0 = std::fma(w[i], x[i], a0);
    a1 = std::fma(w[i + 1], x[i + 1], a1);
    a2 = std::fma(w[i + 2], x[i + 2], a2);
    a3 = std::fma(w[i + 3], x[i + 3], a3);
  }
  double tail = 0;
  for (std::size_t i = n4; i < n; ++i) tail = std::fma(w[i], x[i], tail);
  return ((a0 + a2) + (a1 + a3)) + tail;
}

#ifdef LOT_HAVE_AVX2_TU
bool avx2_supported() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelTable* pick_active() {
  const char* env = std::getenv("LOT_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return &scalar_table();
#ifdef LOT_HAVE_AVX2_TU
  if (want == "avx2") {
    if (avx2_supported()) return &avx2_table();
    return &scalar_table();
  }
#endif
#ifdef LOT_HAVE_NEON_TU
  if (want == "neon") return &neon_table();
#endif
  // auto (and unknown values): best supported variant, else scalar.
#ifdef LOT_HAVE_AVX2_TU
  if (avx2_supported()) return &avx2_table();
#endif
#ifdef LOT_HAVE_NEON_TU
  return &neon_table();
#else
  return &scalar_table();
#endif
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", ell2d_scalar, sum_scalar, dot_scalar};
  return table;
}

const KernelTable& active() {
  static const KernelTable* table = pick_active();
  return *table;
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
#ifdef LOT_HAVE_AVX2_TU
  if (avx2_supported()) tables.push_back(&avx2_table());
#endif
#ifdef LOT_HAVE_NEON_TU
  tables.push_back(&neon_table());
#endif
  return tables;
}

}  // namespace lot::kernels
