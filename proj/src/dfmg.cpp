// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/dfmg.hpp"

#include <atomic>

namespace combo {

namespace {

struct GridIdx {
  std::int64_t n1, n2, n3;
  std::int64_t wrap(std::int64_t a, std::int64_t n) const {
    a %= n;
    return a < 0 ? a + n : a;
  }
  std::size_t at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>(
        (wrap(i, n1) * n2 + wrap(j, n2)) * n3 + wrap(k, n3));
  }
};

/// Full deformation gradient of the doubly-fine cell (host c, subcell s).
/// Diagonal components sit at the host cell center; the (d,e) off-diagonal
/// pair is read at host + s_d e_d + s_e e_e.
Mat3 gather_dfc(const Field9& f, const GridIdx& g, std::int64_t n,
                std::int64_t ci, std::int64_t cj, std::int64_t ck,
                int s1, int s2, int s3) {
  const std::size_t c0 = g.at(ci, cj, ck);
  const std::size_t c12 = g.at(ci + s1, cj + s2, ck);
  const std::size_t c13 = g.at(ci + s1, cj, ck + s3);
  const std::size_t c23 = g.at(ci, cj + s2, ck + s3);
  const double* d = f.data.data();
  const auto sn = static_cast<std::size_t>(n);
  Mat3 m;
  m(0, 0) = d[0 * sn + c0];
  m(1, 1) = d[4 * sn + c0];
  m(2, 2) = d[8 * sn + c0];
  m(0, 1) = d[1 * sn + c12];
  m(1, 0) = d[3 * sn + c12];
  m(0, 2) = d[2 * sn + c13];
  m(2, 0) = d[6 * sn + c13];
  m(1, 2) = d[5 * sn + c23];
  m(2, 1) = d[7 * sn + c23];
  return m;
}

struct EvalCounters {
  std::atomic<std::int64_t> inadmissible{0};
  std::atomic<std::int64_t> failures{0};
  std::atomic<std::int64_t> backproj{0};
  std::atomic<int> iter_max{0};

  SweepStats stats() const {
    SweepStats st;
    st.inadmissible_cells = inadmissible.load();
    st.laminate_failures = failures.load();
    st.back_projections = backproj.load();
    st.laminate_iter_max = iter_max.load();
    return st;
  }
};

/// Evaluates the host cell's law on the assembled F. The warm-start snapshot
/// is read-only; updates go to the live array only when owner == true (the
/// enumeration where host cell and subcell identify the doubly-fine cell
/// uniquely), keeping writers disjoint.
bool eval_dfc(CellMaterials& cm, const std::vector<Vec3>& warm_snapshot,
              DfmgState& state, std::size_t host_cell, std::size_t dfc_id,
              bool owner, const Mat3& fdfc, bool want_tan, Mat3& p, Mat9* a,
              EvalCounters& ctr) {
  const std::uint8_t ph = cm.cell_phase(host_cell);
  if (ph == 2) {
    const std::int32_t id = cm.combo_id(host_cell);
    LaminateSolution sol;
    try {
      sol = finite_strain_solve(fdfc, cm.inclusion(), cm.matrix(),
                                cm.meta(id), warm_snapshot[dfc_id],
                                cm.laminate_options(), want_tan);
    } catch (const InadmissibleMacroState&) {
      ctr.inadmissible.fetch_add(1, std::memory_order_relaxed);
      return false;
    }
    if (!sol.state.converged)
      ctr.failures.fetch_add(1, std::memory_order_relaxed);
    if (owner) {
      ctr.backproj.fetch_add(sol.state.back_projections,
                             std::memory_order_relaxed);
      int prev = ctr.iter_max.load(std::memory_order_relaxed);
      while (prev < sol.state.iterations &&
             !ctr.iter_max.compare_exchange_weak(prev, sol.state.iterations)) {
      }
      state.warm_a[dfc_id] = sol.state.a;
    }
    p = sol.result.p_box;
    if (a) *a = sol.result.a_box;
    return true;
  }
  const MaterialLaw& law = ph == 1 ? cm.inclusion() : cm.matrix();
  const bool ok = want_tan && a ? law.eval_tangent(fdfc, p, *a)
                                : law.eval(fdfc, p);
  if (!ok) {
    ctr.inadmissible.fetch_add(1, std::memory_order_relaxed);
    p = Mat3::Zero();
    if (a) *a = Mat9::Identity();
  }
  return ok;
}

// the four staggered position classes: diagonal components plus the three
// off-diagonal pairs; off-diagonal hosts sit at xi - l_a e_a - l_b e_b
struct PositionClass {
  int axis_a, axis_b;              // -1,-1 for the diagonal class
  std::array<int, 3> components;   // flat 3i+J indices averaged here
  int ncomp;
};

constexpr PositionClass kClasses[4] = {
    {-1, -1, {0, 4, 8}, 3},
    {0, 1, {1, 3, -1}, 2},
    {0, 2, {2, 6, -1}, 2},
    {1, 2, {5, 7, -1}, 2},
};

}  // namespace

SweepStats dfmg_stress(CellMaterials& cm, DfmgState& state, const Field9& f,
                       Field9& p, Exec exec) {
  const SimGrid& grid = f.grid;
  const std::int64_t n = grid.cells();
  if (state.warm_a.size() != static_cast<std::size_t>(8 * n)) state.resize(n);
  if (p.cells() != n) p = Field9(grid);
  const GridIdx g{grid.dims[0], grid.dims[1], grid.dims[2]};
  const std::vector<Vec3> snapshot = state.warm_a;
  EvalCounters ctr;

#pragma omp parallel for collapse(2) schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < grid.dims[0]; ++i) {
    for (std::int64_t j = 0; j < grid.dims[1]; ++j) {
      for (std::int64_t k = 0; k < grid.dims[2]; ++k) {
        const std::size_t cell = grid.index(i, j, k);
        double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
        for (const auto& cls : kClasses) {
          for (int code = 0; code < 8; ++code) {
            const int l1 = code & 1, l2 = (code >> 1) & 1, l3 = (code >> 2) & 1;
            const int l[3] = {l1, l2, l3};
            std::int64_t hi = i, hj = j, hk = k;
            if (cls.axis_a >= 0) {
              const int la = l[cls.axis_a], lb = l[cls.axis_b];
              if (cls.axis_a == 0) hi -= la;
              if (cls.axis_a == 1) hj -= la;
              if (cls.axis_b == 1) hj -= lb;
              if (cls.axis_b == 2) hk -= lb;
            }
            const std::size_t host = g.at(hi, hj, hk);
            const Mat3 fd = gather_dfc(f, g, n, hi, hj, hk, l1, l2, l3);
            const std::size_t dfc = host * 8 + static_cast<std::size_t>(code);
            const bool owner = cls.axis_a < 0;
            Mat3 pd;
            eval_dfc(cm, snapshot, state, host, dfc, owner, fd,
                     /*want_tan=*/false, pd, nullptr, ctr);
            for (int c = 0; c < cls.ncomp; ++c) {
              const int comp = cls.components[static_cast<std::size_t>(c)];
              acc[comp] += pd(comp / 3, comp % 3);
            }
          }
        }
        for (int c = 0; c < 9; ++c)
          p.data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) +
                 cell] = acc[c] / 8.0;
      }
    }
  }
  return ctr.stats();
}

SweepStats dfmg_tangent_pass(CellMaterials& cm, DfmgState& state,
                             const Field9& f, std::vector<double>& tangents45,
                             Exec exec) {
  const SimGrid& grid = f.grid;
  const std::int64_t n = grid.cells();
  if (state.warm_a.size() != static_cast<std::size_t>(8 * n)) state.resize(n);
  tangents45.resize(static_cast<std::size_t>(45 * 8 * n));
  const GridIdx g{grid.dims[0], grid.dims[1], grid.dims[2]};
  const std::vector<Vec3> snapshot = state.warm_a;
  EvalCounters ctr;

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t cell = 0; cell < n; ++cell) {
    const std::int64_t i = cell / (grid.dims[1] * grid.dims[2]);
    const std::int64_t j = (cell / grid.dims[2]) % grid.dims[1];
    const std::int64_t k = cell % grid.dims[2];
    for (int code = 0; code < 8; ++code) {
      const int l1 = code & 1, l2 = (code >> 1) & 1, l3 = (code >> 2) & 1;
      const Mat3 fd = gather_dfc(f, g, n, i, j, k, l1, l2, l3);
      const std::size_t dfc =
          static_cast<std::size_t>(cell) * 8 + static_cast<std::size_t>(code);
      Mat3 pd;
      Mat9 ad;
      eval_dfc(cm, snapshot, state, static_cast<std::size_t>(cell), dfc,
               /*owner=*/true, fd, /*want_tan=*/true, pd, &ad, ctr);
      pack45(ad, tangents45.data() + 45 * static_cast<std::ptrdiff_t>(dfc));
    }
  }
  return ctr.stats();
}

void dfmg_tangent_matvec(const CellMaterials& /*cm*/,
                         const std::vector<double>& tangents45,
                         const Field9& x, Field9& y, Exec exec) {
  const SimGrid& grid = x.grid;
  const std::int64_t n = grid.cells();
  if (y.cells() != n) y = Field9(grid);
  const GridIdx g{grid.dims[0], grid.dims[1], grid.dims[2]};

#pragma omp parallel for collapse(2) schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < grid.dims[0]; ++i) {
    for (std::int64_t j = 0; j < grid.dims[1]; ++j) {
      for (std::int64_t k = 0; k < grid.dims[2]; ++k) {
        const std::size_t cell = grid.index(i, j, k);
        double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
        for (const auto& cls : kClasses) {
          for (int code = 0; code < 8; ++code) {
            const int l1 = code & 1, l2 = (code >> 1) & 1, l3 = (code >> 2) & 1;
            const int l[3] = {l1, l2, l3};
            std::int64_t hi = i, hj = j, hk = k;
            if (cls.axis_a >= 0) {
              const int la = l[cls.axis_a], lb = l[cls.axis_b];
              if (cls.axis_a == 0) hi -= la;
              if (cls.axis_a == 1) hj -= la;
              if (cls.axis_b == 1) hj -= lb;
              if (cls.axis_b == 2) hk -= lb;
            }
            const std::size_t host = g.at(hi, hj, hk);
            const Mat3 xd = gather_dfc(x, g, n, hi, hj, hk, l1, l2, l3);
            const std::size_t dfc = host * 8 + static_cast<std::size_t>(code);
            const Mat9 ad =
                unpack45(tangents45.data() + 45 * static_cast<std::ptrdiff_t>(dfc));
            const Vec9 yd = ad * to_vector9(xd);
            for (int c = 0; c < cls.ncomp; ++c) {
              const int comp = cls.components[static_cast<std::size_t>(c)];
              acc[comp] += yd[comp];
            }
          }
        }
        for (int c = 0; c < 9; ++c)
          y.data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) +
                 cell] = acc[c] / 8.0;
      }
    }
  }
}

}  // namespace combo
