// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/cell_material.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace combo {

CellMaterials::CellMaterials(const ComboGrid& grid, MaterialPtr matrix,
                             MaterialPtr inclusion, bool combo,
                             LaminateOptions lam)
    : matrix_(std::move(matrix)),
      inclusion_(std::move(inclusion)),
      lam_(lam),
      combo_(combo) {
  grid_.dims = grid.dims;
  grid_.lengths = grid.lengths;
  const std::int64_t n = grid_.cells();
  phase_.assign(static_cast<std::size_t>(n), 0);
  combo_id_.assign(static_cast<std::size_t>(n), -1);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    switch (grid.kind[si]) {
      case BoxelKind::pure_matrix:
        phase_[si] = 0;
        break;
      case BoxelKind::pure_inclusion:
        phase_[si] = 1;
        break;
      case BoxelKind::composite:
        // c_min > 0 reassigns extreme-fraction boxels to the majority phase
        // (ablation switch; the default 0 keeps every laminate)
        if (combo_ && grid.c_plus[si] >= lam_.c_min &&
            1.0 - grid.c_plus[si] >= lam_.c_min) {
          phase_[si] = 2;
          combo_id_[si] = static_cast<std::int32_t>(metas_.size());
          combo_cells_.push_back(si);
          metas_.push_back(ComboMeta::make(grid.normal[si], grid.c_plus[si]));
          c_plus_.push_back(grid.c_plus[si]);
        } else {
          phase_[si] = grid.c_plus[si] >= 0.5 ? 1 : 0;
        }
        break;
    }
  }
  warm_a_.assign(metas_.size(), Vec3::Zero());
  if (lam_.stress_floor == 0.0) {
    double lo, hi;
    spectrum_bounds(Mat3::Identity(), lo, hi);
    lam_.stress_floor = 1e-12 * std::max(hi, 1e-12);
  }
}

bool CellMaterials::homogeneous() const {
  if (!metas_.empty()) return false;
  for (auto p : phase_)
    if (p != phase_[0]) return false;
  return true;
}

void CellMaterials::reset_warm_starts() {
  std::fill(warm_a_.begin(), warm_a_.end(), Vec3::Zero());
}

double CellMaterials::represented_c_plus() const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < phase_.size(); ++i) {
    if (phase_[i] == 1) acc += 1.0L;
    if (phase_[i] == 2) acc += c_plus_[static_cast<std::size_t>(combo_id_[i])];
  }
  return static_cast<double>(acc / static_cast<long double>(phase_.size()));
}

void CellMaterials::spectrum_bounds(const Mat3& fbar, double& lo,
                                    double& hi) const {
  double l0, h0, l1, h1;
  matrix_->spectrum_bounds(fbar, l0, h0);
  inclusion_->spectrum_bounds(fbar, l1, h1);
  lo = std::min(l0, l1);
  hi = std::max(h0, h1);
}

void pack45(const Mat9& a, double* dst) {
  int t = 0;
  for (int r = 0; r < 9; ++r)
    for (int c = r; c < 9; ++c) dst[t++] = 0.5 * (a(r, c) + a(c, r));
}

Mat9 unpack45(const double* src) {
  Mat9 a;
  int t = 0;
  for (int r = 0; r < 9; ++r)
    for (int c = r; c < 9; ++c) {
      a(r, c) = src[t];
      a(c, r) = src[t];
      ++t;
    }
  return a;
}

SweepStats stress_sweep(CellMaterials& cm, const Field9& f, Field9& p,
                        std::vector<double>* tangents45, Exec exec) {
  const std::int64_t n = cm.cells();
  if (p.cells() != n) p = Field9(f.grid);
  if (tangents45) tangents45->resize(static_cast<std::size_t>(45 * n));

  std::atomic<std::int64_t> inadmissible{0};
  std::atomic<std::int64_t> failures{0};
  std::atomic<std::int64_t> backproj{0};
  std::atomic<int> iter_max{0};

  const bool want_tan = tangents45 != nullptr;

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Mat3 fc = f.cell(si);
    Mat3 pc = Mat3::Zero();
    Mat9 ac;
    const std::uint8_t ph = cm.cell_phase(si);
    if (ph == 2) {
      const std::int32_t id = cm.combo_id(si);
      LaminateSolution sol;
      try {
        sol = finite_strain_solve(fc, cm.inclusion(), cm.matrix(),
                                  cm.meta(id), cm.warm_start(id),
                                  cm.laminate_options(), want_tan);
      } catch (const InadmissibleMacroState&) {
        inadmissible.fetch_add(1, std::memory_order_relaxed);
        p.set_cell(si, Mat3::Zero());
        if (want_tan) pack45(Mat9::Identity(), tangents45->data() + 45 * i);
        continue;
      }
      if (!sol.state.converged)
        failures.fetch_add(1, std::memory_order_relaxed);
      backproj.fetch_add(sol.state.back_projections,
                         std::memory_order_relaxed);
      int prev = iter_max.load(std::memory_order_relaxed);
      while (prev < sol.state.iterations &&
             !iter_max.compare_exchange_weak(prev, sol.state.iterations)) {
      }
      cm.set_warm_start(id, sol.state.a);
      pc = sol.result.p_box;
      if (want_tan) ac = sol.result.a_box;
    } else {
      const MaterialLaw& law = ph == 1 ? cm.inclusion() : cm.matrix();
      const bool ok = want_tan ? law.eval_tangent(fc, pc, ac)
                               : law.eval(fc, pc);
      if (!ok) {
        inadmissible.fetch_add(1, std::memory_order_relaxed);
        pc = Mat3::Zero();
        if (want_tan) ac = Mat9::Identity();
      }
    }
    p.set_cell(si, pc);
    if (want_tan) pack45(ac, tangents45->data() + 45 * i);
  }

  SweepStats st;
  st.inadmissible_cells = inadmissible.load();
  st.laminate_failures = failures.load();
  st.back_projections = backproj.load();
  st.laminate_iter_max = iter_max.load();
  return st;
}

void tangent_matvec(const std::vector<double>& tangents45, const Field9& x,
                    Field9& y, Exec exec) {
  const std::int64_t n = x.cells();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const double* a = tangents45.data() + 45 * i;
    double xv[9], yv[9];
    for (int c = 0; c < 9; ++c)
      xv[c] = x.data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + si];
    for (int c = 0; c < 9; ++c) yv[c] = 0.0;
    int t = 0;
    for (int r = 0; r < 9; ++r) {
      yv[r] += a[t] * xv[r];
      ++t;
      for (int c = r + 1; c < 9; ++c, ++t) {
        yv[r] += a[t] * xv[c];
        yv[c] += a[t] * xv[r];
      }
    }
    for (int c = 0; c < 9; ++c)
      y.data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + si] =
          yv[c];
  }
}

void tangent_spectrum_bounds(const std::vector<double>& tangents45,
                             std::int64_t cells, double& lo, double& hi) {
  lo = std::numeric_limits<double>::max();
  hi = std::numeric_limits<double>::lowest();
#pragma omp parallel
  {
    double l = std::numeric_limits<double>::max();
    double h = std::numeric_limits<double>::lowest();
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < cells; ++i) {
      const Mat9 a = unpack45(tangents45.data() + 45 * i);
      for (int r = 0; r < 9; ++r) {
        double off = 0.0;
        for (int c = 0; c < 9; ++c)
          if (c != r) off += std::abs(a(r, c));
        l = std::min(l, a(r, r) - off);
        h = std::max(h, a(r, r) + off);
      }
    }
#pragma omp critical
    {
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
  }
}

}  // namespace combo
