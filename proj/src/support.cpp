#include "lot/support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "lot/errors.hpp"

namespace lot::support {

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

std::vector<double> halton_point(std::uint64_t index, int d) {
  static constexpr std::uint32_t primes[] = {2,  3,  5,  7,  11, 13,
                                             17, 19, 23, 29, 31, 37};
  require(d >= 1 && d <= 12, "halton_point supports 1..12 dimensions");
  std::vector<double> p(d);
  // index + 1: the zeroth Halton point is the origin corner, skip it.
  for (int k = 0; k < d; ++k) p[k] = radical_inverse(index + 1, primes[k]);
  return p;
}

std::vector<std::vector<double>> halton_ball(int dim, double radius, int count,
                                             std::uint64_t offset) {
  require(dim >= 1 && radius > 0.0 && count >= 1, "bad ball sampling request");
  std::vector<std::vector<double>> out;
  out.reserve(count);
  std::uint64_t index = offset;
  const std::uint64_t cap =
      offset + static_cast<std::uint64_t>(count) * 10000ull;
  while (out.size() < static_cast<std::size_t>(count) && index < cap) {
    const std::vector<double> h = halton_point(index++, dim);
    std::vector<double> x(dim);
    double q = 0.0;
    for (int a = 0; a < dim; ++a) {
      x[a] = radius * (2.0 * h[a] - 1.0);
      q += x[a] * x[a];
    }
    if (q <= radius * radius) out.push_back(std::move(x));
  }
  require(out.size() == static_cast<std::size_t>(count),
          "ball sampling starved");
  return out;
}

Quadrature gauss_legendre(int n) {
  require(n >= 1, "quadrature order must be positive");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on Legendre polynomials from the Chebyshev initial guess.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[n - 1 - i] = x;
    q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

int thread_count() {
  if (const char* env = std::getenv("LOT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<std::size_t>(thread_count(), n == 0 ? 1 : n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Fixed contiguous chunks: the work split does not depend on timing, so any
  // output written per-index is identical to the serial run.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lot::support
