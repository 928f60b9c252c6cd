// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "combo/combo_grid.hpp"
#include "combo/field.hpp"
#include "combo/laminate.hpp"
#include "combo/materials.hpp"

namespace combo {

/// Per-cell constitutive binding for the solver grid. Pure cells carry one
/// phase law; composite cells carry laminate metadata plus a persistent
/// warm-started jump vector (one writer per boxel).
class CellMaterials {
 public:
  /// combo=true keeps composite boxels as laminates; combo=false assigns the
  /// majority phase (ties go to the inclusion).
  CellMaterials(const ComboGrid& grid, MaterialPtr matrix, MaterialPtr inclusion,
                bool combo, LaminateOptions lam = {});

  const SimGrid& grid() const { return grid_; }
  std::int64_t cells() const { return grid_.cells(); }
  bool homogeneous() const;
  std::int64_t composite_cells() const { return static_cast<std::int64_t>(metas_.size()); }

  const MaterialLaw& matrix() const { return *matrix_; }
  const MaterialLaw& inclusion() const { return *inclusion_; }

  std::uint8_t cell_phase(std::size_t cell) const { return phase_[cell]; }
  std::int32_t combo_id(std::size_t cell) const { return combo_id_[cell]; }
  const ComboMeta& meta(std::int32_t id) const {
    return metas_[static_cast<std::size_t>(id)];
  }
  const std::vector<ComboMeta>& metas() const { return metas_; }
  std::size_t combo_cell(std::int32_t id) const {
    return combo_cells_[static_cast<std::size_t>(id)];
  }
  Vec3 warm_start(std::int32_t id) const {
    return warm_a_[static_cast<std::size_t>(id)];
  }
  void set_warm_start(std::int32_t id, const Vec3& a) {
    warm_a_[static_cast<std::size_t>(id)] = a;
  }
  std::vector<Vec3>& warm_all() { return warm_a_; }
  const std::vector<Vec3>& warm_all() const { return warm_a_; }
  void reset_warm_starts();
  const LaminateOptions& laminate_options() const { return lam_; }
  LaminateOptions& laminate_options() { return lam_; }

  /// Volume fraction of the inclusion phase as represented on the solver
  /// grid (exact with combo on, staircase-approximate with combo off).
  double represented_c_plus() const;

  /// Conservative spectrum bounds over all cell tangents near fbar.
  void spectrum_bounds(const Mat3& fbar, double& lo, double& hi) const;

 private:
  SimGrid grid_;
  MaterialPtr matrix_;
  MaterialPtr inclusion_;
  std::vector<std::uint8_t> phase_;      // 0 matrix, 1 inclusion, 2 composite
  std::vector<std::int32_t> combo_id_;   // -1 for pure cells
  std::vector<std::size_t> combo_cells_; // cell index per composite id
  std::vector<ComboMeta> metas_;
  std::vector<Vec3> warm_a_;
  std::vector<double> c_plus_;           // per composite id
  LaminateOptions lam_;
  bool combo_ = true;
};

struct SweepStats {
  std::int64_t inadmissible_cells = 0;    // pure-phase evals with det F <= 0
  std::int64_t laminate_failures = 0;     // composite solves not converged
  std::int64_t back_projections = 0;
  int laminate_iter_max = 0;
  bool clean() const {
    return inadmissible_cells == 0 && laminate_failures == 0;
  }
};

/// Pointwise constitutive sweep P(F); optionally stores the per-cell tangent
/// packed as the 45 upper-triangle entries of the (major symmetric) 9x9.
/// Composite cells run the laminate Newton warm started from the stored jump
/// vector and write the converged vector back (disjoint writes).
SweepStats stress_sweep(CellMaterials& cm, const Field9& f, Field9& p,
                        std::vector<double>* tangents45,
                        Exec exec = Exec::parallel);

/// y_cell = A_cell x_cell with the packed tangents from stress_sweep.
void tangent_matvec(const std::vector<double>& tangents45, const Field9& x,
                    Field9& y, Exec exec = Exec::parallel);

/// Gershgorin bounds over the packed tangents (deterministic min/max).
void tangent_spectrum_bounds(const std::vector<double>& tangents45,
                             std::int64_t cells, double& lo, double& hi);

void pack45(const Mat9& a, double* dst);
Mat9 unpack45(const double* src);

}  // namespace combo
