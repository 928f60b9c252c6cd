// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "combo/cell_material.hpp"
#include "combo/dfmg.hpp"
#include "combo/green.hpp"

namespace combo {

enum class Scheme { basic, newton_cg };
enum class MaterialEval { per_cell, dfmg };

struct SolverConfig {
  Scheme scheme = Scheme::newton_cg;
  GreenKind green = GreenKind::rotated;
  MaterialEval eval = MaterialEval::per_cell;  // dfmg requires staggered
  double tol_equilibrium = 1e-8;
  int max_outer = 200;
  double cg_tol = 1e-2;  // forcing-term cap for the inner CG
  int cg_max = 2000;
  int load_steps = 1;
  int max_bisections = 5;
  int threads = 0;
  bool verbose = false;

  void validate() const;
};

struct StepReport {
  double t_start = 0.0;
  double t_end = 0.0;
  Mat3 fbar = Mat3::Identity();
  bool converged = false;
  int outer_iters = 0;
  std::vector<double> residuals;  // per accepted outer iteration
  std::vector<int> cg_iters;
  int cg_breakdowns = 0;
  int line_search_cuts = 0;
  SweepStats sweep;  // from the last constitutive sweep
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<StepReport> steps;
  bool success = false;
  std::string error;
  int bisections = 0;
  double alpha = 0.0;  // reference medium of the last step (basic scheme)
  double seconds_total = 0.0;
};

struct SolveResult {
  Field9 f;  // converged deformation gradient field
  Field9 p;  // matching stress field
  Mat3 pbar = Mat3::Zero();
  ConvergenceReport report;
};

/// Solves the periodic cell problem  Div P(F) = 0, <F> = fbar  with the
/// selected scheme/Green-operator/material-evaluation combination, ramping
/// the load linearly from I over cfg.load_steps with warm starts and
/// bisection on failure.
SolveResult solve(CellMaterials& materials, const Mat3& fbar,
                  const SolverConfig& cfg);

}  // namespace combo
