// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/field.hpp"

namespace combo {

void Field9::fill(const Mat3& m) {
  const std::int64_t n = cells();
  for (int c = 0; c < 9; ++c) {
    const double v = m(c / 3, c % 3);
    double* p = comp(c);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) p[i] = v;
  }
}

Mat3 Field9::mean(Exec exec) const {
  Mat3 m;
  const std::int64_t n = cells();
  for (int c = 0; c < 9; ++c)
    m(c / 3, c % 3) =
        deterministic_sum(comp(c), static_cast<std::size_t>(n), exec) /
        static_cast<double>(n);
  return m;
}

void Field9::pin_mean(const Mat3& target, Exec exec) {
  const Mat3 cur = mean(exec);
  const std::int64_t n = cells();
  for (int c = 0; c < 9; ++c) {
    const double shift = target(c / 3, c % 3) - cur(c / 3, c % 3);
    if (shift == 0.0) continue;
    double* p = comp(c);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) p[i] += shift;
  }
}

}  // namespace combo
