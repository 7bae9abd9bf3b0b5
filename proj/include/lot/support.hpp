#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace lot::support {

// Van der Corput radical inverse in the given base (Halton component).
double radical_inverse(std::uint64_t index, std::uint32_t base);

// d-dimensional Halton point (bases = first d primes), index >= 0.
std::vector<double> halton_point(std::uint64_t index, int d);

// Low-discrepancy cloud on the Euclidean ball of the given radius about the
// origin (Halton rejection sampling); deterministic in (dim, radius, count,
// offset). The offset shifts the start of the Halton sequence and plays the
// role of a seed.
std::vector<std::vector<double>> halton_ball(int dim, double radius, int count,
                                             std::uint64_t offset = 0);

// Gauss-Legendre nodes/weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// Rescale a rule to [a, b].
Quadrature gauss_legendre(int n, double a, double b);

// Worker cap from LOT_THREADS (>= 1; default: hardware concurrency).
int thread_count();

// Deterministic chunked parallel map: fn(i) for i in [0, n) is executed on up
// to thread_count() workers in fixed chunks; results identical to serial.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lot::support
