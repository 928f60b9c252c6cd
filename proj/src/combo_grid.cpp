// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/combo_grid.hpp"

#include "combo/errors.hpp"

namespace combo {

std::int64_t ComboGrid::composite_count() const {
  std::int64_t n = 0;
  for (auto k : kind)
    if (k == BoxelKind::composite) ++n;
  return n;
}

std::int64_t ComboGrid::global_count_plus() const {
  std::int64_t n = 0;
  for (auto c : count_plus) n += c;
  return n;
}

double ComboGrid::global_c_plus() const {
  return static_cast<double>(global_count_plus()) /
         static_cast<double>(boxel_count() * fine_per_boxel());
}

ComboGrid coarsen(const PhaseImage& img,
                  const std::array<std::int64_t, 3>& factors, Exec exec) {
  ComboGrid g;
  g.factors = factors;
  g.lengths = img.lengths;
  for (int a = 0; a < 3; ++a) {
    const auto f = factors[static_cast<std::size_t>(a)];
    const auto n = img.dims[static_cast<std::size_t>(a)];
    if (f < 1 || n % f != 0)
      throw NonDividingFactor("coarsen: factor does not divide image dims");
    g.dims[static_cast<std::size_t>(a)] = n / f;
  }
  const std::int64_t nb = g.boxel_count();
  const std::int64_t vol = g.fine_per_boxel();
  g.kind.assign(static_cast<std::size_t>(nb), BoxelKind::pure_matrix);
  g.c_plus.assign(static_cast<std::size_t>(nb), 0.0);
  g.count_plus.assign(static_cast<std::size_t>(nb), 0);
  g.normal.assign(static_cast<std::size_t>(nb), Vec3::Zero());
  g.normal_flag.assign(static_cast<std::size_t>(nb), normal_none);

  const auto [f1, f2, f3] = factors;
#pragma omp parallel for collapse(2) schedule(static) if (exec == Exec::parallel)
  for (std::int64_t bi = 0; bi < g.dims[0]; ++bi) {
    for (std::int64_t bj = 0; bj < g.dims[1]; ++bj) {
      for (std::int64_t bk = 0; bk < g.dims[2]; ++bk) {
        std::int64_t cnt = 0;
        for (std::int64_t a = 0; a < f1; ++a)
          for (std::int64_t b = 0; b < f2; ++b) {
            const std::size_t base =
                img.index(bi * f1 + a, bj * f2 + b, bk * f3);
            for (std::int64_t c = 0; c < f3; ++c)
              cnt += img.data[base + static_cast<std::size_t>(c)];
          }
        const std::size_t ib = g.index(bi, bj, bk);
        g.count_plus[ib] = cnt;
        g.c_plus[ib] = static_cast<double>(cnt) / static_cast<double>(vol);
        g.kind[ib] = cnt == 0     ? BoxelKind::pure_matrix
                     : cnt == vol ? BoxelKind::pure_inclusion
                                  : BoxelKind::composite;
      }
    }
  }
  return g;
}

}  // namespace combo
