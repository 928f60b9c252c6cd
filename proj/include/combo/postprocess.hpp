// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "combo/cell_material.hpp"
#include "combo/normals.hpp"

namespace combo {

struct RecoveredFields {
  std::vector<LaminateResult> composite;  // indexed by composite id
  std::vector<JumpVectorState> states;
  int max_resolve_iterations = 0;
};

/// Revisits every composite boxel with its converged F_box and re-solves the
/// laminate from the stored warm start (0-1 iterations), recovering the
/// phase-wise F± and P±.
RecoveredFields recover_phase_fields(const Field9& f, CellMaterials& cm,
                                     Exec exec = Exec::parallel);

struct PhaseAverages {
  Mat3 pbar = Mat3::Zero();
  Mat3 pbar_plus = Mat3::Zero();
  Mat3 pbar_minus = Mat3::Zero();
  bool has_plus = false;
  bool has_minus = false;
  double c_plus = 0.0;  // inclusion volume fraction as represented
};

/// Volume-weighted phase averages with composite boxels split by c±;
/// satisfies c+ Pbar+ + c- Pbar- = Pbar.
PhaseAverages phase_averages(const Field9& f, CellMaterials& cm,
                             const RecoveredFields& rec);

/// Frobenius relative error ||p - ref||_F / ||ref||_F.
double error_norm(const Mat3& p, const Mat3& ref);

struct InterfaceSample {
  std::array<std::int64_t, 3> boxel{0, 0, 0};
  Vec3 centroid = Vec3::Zero();  // facet centroid, material frame
  Vec3 normal = Vec3::Zero();
  Vec3 traction = Vec3::Zero();          // T = P+ N per material area
  Vec3 traction_spatial = Vec3::Zero();  // Nanson push-forward, midpoint F
  double area = 0.0;          // facet area, material frame
  double area_spatial = 0.0;  // midpoint-F push-forward area
};

/// Traction samples on the reconstructed facets. The spatial push-forward
/// uses Nanson's relation with the midpoint deformation gradient
/// (F+ + F-)/2; per-phase variants differ within the laminate tolerance.
std::vector<InterfaceSample> interface_tractions(
    const RecoveredFields& rec, const CellMaterials& cm,
    const std::vector<Facet>& facets, const ComboGrid& grid);

}  // namespace combo
