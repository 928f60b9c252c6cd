// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "combo/materials.hpp"
#include "combo/tensor.hpp"

namespace combo {

/// Composite-boxel metadata: interface normal in the material frame pointing
/// out of phase "+" (the inclusion), plus exact phase volume fractions.
struct ComboMeta {
  Vec3 normal = Vec3::UnitX();
  double c_plus = 0.5;
  double c_minus = 0.5;

  static ComboMeta make(const Vec3& n, double c_plus);
};

// ---------------------------------------------------------------------------
// classical mixing rules and the Milton laminate rule (small strain)

Mat6 mix_voigt(const Mat6& c_plus, const Mat6& c_minus, double cp);
Mat6 mix_reuss(const Mat6& c_plus, const Mat6& c_minus, double cp);
Mat6 mix_hill(const Mat6& c_plus, const Mat6& c_minus, double cp);

double milton_lambda_default(const Mat6& c_plus, const Mat6& c_minus);

/// Implicit laminate mixing rule solved through the printed sequence of six
/// 6x6 inversions. lambda must exceed the largest eigenvalue of either
/// stiffness (BadLambda otherwise); the result does not depend on the
/// admissible lambda.
Mat6 milton_laminate(const Mat6& c_plus, const Mat6& c_minus, double cp,
                     const Vec3& normal, double lambda);

// ---------------------------------------------------------------------------
// small-strain closed form

/// Gradient-jump vector from the linear-elastic traction balance,
/// a = Delta_f^{-1} D_s^T (C_- - C_+) eps_box.
Vec3 small_strain_jump(const Mat3& eps_box, const Mat6& c_plus,
                       const Mat6& c_minus, const ComboMeta& meta);

/// Closed-form laminate stiffness
/// C_box = (c+ C+ + c- C-) - dC D_s Delta_f^{-1} D_s^T dC.
Mat6 small_strain_stiffness(const Mat6& c_plus, const Mat6& c_minus,
                            const ComboMeta& meta);

// ---------------------------------------------------------------------------
// finite strain

/// Admissible band for the jump vector: beta_+ < a . m_beta < beta_- keeps
/// J_+ and J_- positive. Throws InadmissibleMacroState for det(F_box) <= 0.
struct AdmissibleBounds {
  Vec3 m_beta = Vec3::UnitX();
  double beta_plus = 0.0;   // negative
  double beta_minus = 0.0;  // positive
  bool admissible(const Vec3& a) const {
    const double b = a.dot(m_beta);
    return beta_plus < b && b < beta_minus;
  }
};

AdmissibleBounds admissibility_bounds(const Mat3& f_box, const ComboMeta& meta);

/// Midpoint back-projection of an inadmissible iterate a1 given the last
/// admissible a0: the component of a1 orthogonal to m_beta is kept, the
/// parallel one becomes (beta_0 + beta_c)/2.
Vec3 back_project(const Vec3& a1, const Vec3& a0, const AdmissibleBounds& b);

struct LaminateOptions {
  double tol_abs = 0.0;
  double tol_rel = 1e-10;
  double stress_floor = 0.0;  // lower bound of the traction scale
  int max_iter = 50;
  bool back_projection = true;
  double c_min = 0.0;  // ablation switch; 0 disables any fraction clamping
};

struct JumpVectorState {
  Vec3 a = Vec3::Zero();
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;      // ||(P+ - P-) N||
  double residual_rel = 0.0;  // residual / traction scale
  int back_projections = 0;
  int first_inadmissible_iter = -1;  // naive update left the admissible set
};

struct LaminateResult {
  Mat3 f_plus = Mat3::Identity();
  Mat3 f_minus = Mat3::Identity();
  Mat3 p_plus = Mat3::Zero();
  Mat3 p_minus = Mat3::Zero();
  Mat3 p_box = Mat3::Zero();
  Mat3 s_box = Mat3::Zero();  // sym(F_box^{-1} P_box)
  Mat9 a_box = Mat9::Zero();
  Vec3 traction = Vec3::Zero();
  bool tangent_valid = false;
};

struct LaminateSolution {
  LaminateResult result;
  JumpVectorState state;
};

/// Newton-Raphson on the interface traction balance f(a) = (P+ - P-) N with
/// the rank-1 parameterization F± = F_box ± a (x) N / c±. Accepted iterates
/// stay inside the admissible band (J± > 0) via back-projection; with
/// back_projection off the solve stops at the first inadmissible update.
/// Never throws on non-convergence: the best iterate is returned with
/// state.converged = false.
LaminateSolution finite_strain_solve(const Mat3& f_box,
                                     const MaterialLaw& mat_plus,
                                     const MaterialLaw& mat_minus,
                                     const ComboMeta& meta,
                                     const Vec3& a0 = Vec3::Zero(),
                                     const LaminateOptions& opt = {},
                                     bool want_tangent = true);

/// Consistent tangent A_box = (c+ A+ + c- A-) - dA D Delta_f^{-1} D^T dA
/// assembled from converged per-phase tangents.
Mat9 effective_tangent(const Mat9& a_plus, const Mat9& a_minus,
                       const ComboMeta& meta);

// ---------------------------------------------------------------------------
// thermal analogue

struct ThermalLaminate {
  double jump = 0.0;  // scalar a with g± = g_box ± a N / c±
  Vec3 g_plus = Vec3::Zero();
  Vec3 g_minus = Vec3::Zero();
  Vec3 q_box = Vec3::Zero();
  Mat3 kappa_box = Mat3::Zero();
};

ThermalLaminate thermal_jump(const Vec3& g_box, const ThermalParams& kappa_plus,
                             const ThermalParams& kappa_minus,
                             const ComboMeta& meta);

}  // namespace combo
