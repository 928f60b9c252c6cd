// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace combo {

/// Execution policy for the data-parallel kernels. Every OpenMP kernel has a
/// serial twin that performs the identical arithmetic in the identical order;
/// the tests assert bitwise equality between the two.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Chunked sum with a thread-count-independent combination order: partial
/// sums over fixed-size chunks are reduced serially in chunk order. The
/// result is bitwise identical for any thread count, including serial.
inline double deterministic_sum(const double* x, std::size_t n,
                                Exec exec = Exec::parallel) {
  constexpr std::size_t chunk = 4096;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      const std::size_t lo = static_cast<std::size_t>(c) * chunk;
      const std::size_t hi = lo + chunk < n ? lo + chunk : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += x[i];
      partial[static_cast<std::size_t>(c)] = s;
    }
  } else {
    for (std::size_t c = 0; c < nchunks; ++c) {
      const std::size_t lo = c * chunk;
      const std::size_t hi = lo + chunk < n ? lo + chunk : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += x[i];
      partial[c] = s;
    }
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Same chunked scheme for a dot product.
inline double deterministic_dot(const double* x, const double* y,
                                std::size_t n, Exec exec = Exec::parallel) {
  constexpr std::size_t chunk = 4096;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Same chunked scheme for a sum of squares.
inline double deterministic_sumsq(const double* x, std::size_t n,
                                  Exec exec = Exec::parallel) {
  constexpr std::size_t chunk = 4096;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * x[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace combo
