// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "combo/cell_material.hpp"
#include "combo/field.hpp"

namespace combo {

/// Persistent per-doubly-fine-cell state for DFMG sweeps: jump-vector warm
/// starts for composite host cells (id = cell*8 + subcell code).
struct DfmgState {
  std::vector<Vec3> warm_a;
  void resize(std::int64_t cells) {
    warm_a.assign(static_cast<std::size_t>(8 * cells), Vec3::Zero());
  }
};

/// Stress on the staggered grid via the doubly-fine material grid: every
/// staggered component is the average over its 8 adjacent doubly-fine cells
/// of the host cell's law evaluated on the locally assembled F. Doubly-fine
/// states are assembled on the fly; nothing is materialized.
SweepStats dfmg_stress(CellMaterials& cm, DfmgState& state, const Field9& f,
                       Field9& p, Exec exec = Exec::parallel);

/// Packed per-doubly-fine-cell tangents (45 doubles each) for the exact
/// linearization of dfmg_stress; one evaluation per doubly-fine cell.
SweepStats dfmg_tangent_pass(CellMaterials& cm, DfmgState& state,
                             const Field9& f, std::vector<double>& tangents45,
                             Exec exec = Exec::parallel);

/// y = (d dfmg_stress / d F) x using the stored tangents.
void dfmg_tangent_matvec(const CellMaterials& cm,
                         const std::vector<double>& tangents45,
                         const Field9& x, Field9& y,
                         Exec exec = Exec::parallel);

}  // namespace combo
