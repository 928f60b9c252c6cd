// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "combo/errors.hpp"

namespace combo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rms9(const Field9& f) {
  const auto n = static_cast<std::size_t>(f.cells());
  double ss = 0.0;
  for (int c = 0; c < 9; ++c) ss += deterministic_sumsq(f.comp(c), n);
  return std::sqrt(ss / static_cast<double>(n));
}

double dot9(const Field9& a, const Field9& b) {
  return deterministic_dot(a.data.data(), b.data.data(), a.data.size());
}

void axpy(Field9& y, double a, const Field9& x) {
  const std::int64_t n = static_cast<std::int64_t>(y.data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y.data[i] += a * x.data[i];
}

/// One solver context per load path: owns the FFT buffers, the Green
/// operator and the scratch fields.
class CellSolver {
 public:
  CellSolver(CellMaterials& cm, const SolverConfig& cfg)
      : cm_(cm),
        cfg_(cfg),
        grid_(cm.grid()),
        green_(cfg.green, cm.grid()),
        fft_(cm.grid().dims, 9, cfg.threads),
        p_(cm.grid()),
        proj_(cm.grid()),
        stress_floor_(1e-300) {
    double lo, hi;
    cm_.spectrum_bounds(Mat3::Identity(), lo, hi);
    stress_floor_ = 1e-12 * std::max(hi, 1e-12);
    if (cfg_.eval == MaterialEval::dfmg) dfmg_state_.resize(grid_.cells());
  }

  StepReport run_step(Field9& f, const Mat3& fbar, double t0, double t1);

  const Field9& stress() const { return p_; }
  Mat3 pbar() const { return pbar_; }
  double alpha() const { return alpha_; }
  DfmgState& dfmg_state() { return dfmg_state_; }

 private:
  SweepStats eval_stress(const Field9& f) {
    if (cfg_.eval == MaterialEval::dfmg)
      return dfmg_stress(cm_, dfmg_state_, f, p_);
    return stress_sweep(cm_, f, p_, nullptr);
  }

  SweepStats eval_tangent(const Field9& f) {
    if (cfg_.eval == MaterialEval::dfmg) {
      const SweepStats s1 = dfmg_stress(cm_, dfmg_state_, f, p_);
      SweepStats s2 = dfmg_tangent_pass(cm_, dfmg_state_, f, tangents_);
      s2.inadmissible_cells += s1.inadmissible_cells;
      s2.laminate_failures = s1.laminate_failures;
      s2.back_projections = s1.back_projections;
      return s2;
    }
    return stress_sweep(cm_, f, p_, &tangents_);
  }

  void apply_tangent(const Field9& x, Field9& y) {
    if (cfg_.eval == MaterialEval::dfmg)
      dfmg_tangent_matvec(cm_, tangents_, x, y);
    else
      tangent_matvec(tangents_, x, y);
  }

  /// residual = ||Pi(P)||_rms / max(||pbar||_F, floor); fills `out` with
  /// Pi(P) for reuse.
  double residual_from_stress(Field9& out) {
    green_.project(p_, out, fft_);
    pbar_ = p_.mean();
    return rms9(out) / std::max(pbar_.norm(), stress_floor_);
  }

  void pick_alpha(const Mat3& fbar) {
    double lo, hi;
    cm_.spectrum_bounds(fbar, lo, hi);
    alpha_ = 0.5 * (std::max(lo, 0.0) + hi);
    if (!(alpha_ > 0.0)) alpha_ = std::max(hi, 1.0);
  }

  bool run_basic(Field9& f, const Mat3& fbar, StepReport& rep);
  bool run_newton(Field9& f, const Mat3& fbar, StepReport& rep);
  int cg_solve(Field9& x, const Field9& b, double tol_rel, bool& breakdown);

  CellMaterials& cm_;
  SolverConfig cfg_;
  SimGrid grid_;
  GreenOperator green_;
  Fft3 fft_;
  Field9 p_;
  Field9 proj_;
  std::vector<double> tangents_;
  DfmgState dfmg_state_;
  Mat3 pbar_ = Mat3::Zero();
  double alpha_ = 1.0;
  double stress_floor_;
};

bool CellSolver::run_basic(Field9& f, const Mat3& fbar, StepReport& rep) {
  pick_alpha(fbar);
  Field9 tau(grid_);
  for (int it = 1; it <= cfg_.max_outer; ++it) {
    rep.sweep = eval_stress(f);
    if (rep.sweep.inadmissible_cells > 0) return false;
    pbar_ = p_.mean();
    // tau = P - alpha F, F_new = fbar - Pi(tau)/alpha
    tau.data = p_.data;
    axpy(tau, -alpha_, f);
    green_.project(tau, proj_, fft_);
    const std::int64_t cells = f.cells();
    Field9 fnew(grid_);
    for (int c = 0; c < 9; ++c) {
      const double fb = fbar(c / 3, c % 3);
      const double* g = proj_.comp(c);
      double* out = fnew.comp(c);
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < cells; ++i) out[i] = fb - g[i] / alpha_;
    }
    // alpha * ||F_new - F||_rms equals ||Pi(P)||_rms for compatible F
    Field9 diff = fnew;
    axpy(diff, -1.0, f);
    const double resid =
        alpha_ * rms9(diff) / std::max(pbar_.norm(), stress_floor_);
    rep.residuals.push_back(resid);
    rep.cg_iters.push_back(0);
    rep.outer_iters = it;
    if (cfg_.verbose)
      std::printf("  basic it %3d resid %.3e\n", it, resid);
    f.data.swap(fnew.data);
    f.pin_mean(fbar);
    if (rep.sweep.laminate_failures > 0 && resid <= cfg_.tol_equilibrium)
      return false;  // persistent laminate failures invalidate convergence
    if (resid <= cfg_.tol_equilibrium) {
      rep.converged = true;
      return true;
    }
  }
  return false;
}

int CellSolver::cg_solve(Field9& x, const Field9& b, double tol_rel,
                         bool& breakdown) {
  breakdown = false;
  x = Field9(grid_);
  Field9 r = b;
  Field9 q(grid_);
  Field9 ap(grid_);
  double rr = dot9(r, r);
  const double bnorm = std::sqrt(rr);
  if (bnorm == 0.0) return 0;
  Field9 pdir = r;
  int it = 0;
  while (it < cfg_.cg_max) {
    apply_tangent(pdir, q);
    green_.project(q, ap, fft_);
    const double pap = dot9(pdir, ap);
    if (!(pap > 0.0)) {
      breakdown = true;
      return it;
    }
    const double step = rr / pap;
    axpy(x, step, pdir);
    axpy(r, -step, ap);
    ++it;
    const double rr_new = dot9(r, r);
    if (std::sqrt(rr_new) <= tol_rel * bnorm) return it;
    const double beta = rr_new / rr;
    rr = rr_new;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pdir.data.size());
         ++i)
      pdir.data[i] = r.data[i] + beta * pdir.data[i];
  }
  return it;
}

bool CellSolver::run_newton(Field9& f, const Mat3& fbar, StepReport& rep) {
  Field9 b(grid_);
  Field9 x(grid_);
  Field9 ftrial(grid_);
  for (int it = 1; it <= cfg_.max_outer; ++it) {
    rep.sweep = eval_tangent(f);
    if (rep.sweep.inadmissible_cells > 0) return false;
    green_.project(p_, b, fft_);
    pbar_ = p_.mean();
    const double den = std::max(pbar_.norm(), stress_floor_);
    const double resid = rms9(b) / den;
    rep.residuals.push_back(resid);
    rep.outer_iters = it;
    if (cfg_.verbose) std::printf("  newton it %3d resid %.3e\n", it, resid);
    if (resid <= cfg_.tol_equilibrium) {
      rep.cg_iters.push_back(0);
      rep.converged = rep.sweep.laminate_failures == 0;
      return rep.converged;
    }

    // Newton system Pi(A : dF) = -Pi(P) on compatible mean-free fields
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(b.data.size()); ++i)
      b.data[i] = -b.data[i];
    const double eta =
        std::max(std::min(cfg_.cg_tol, std::sqrt(resid)), 1e-8);
    bool breakdown = false;
    const int cg_its = cg_solve(x, b, eta, breakdown);
    rep.cg_iters.push_back(cg_its);
    if (breakdown) {
      ++rep.cg_breakdowns;
      if (cg_its == 0) return false;  // no usable direction: cut the step
    }

    // backtracking: accepted iterates must be admissible and must not
    // increase the equilibrium residual
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 10; ++ls) {
      ftrial.data = f.data;
      axpy(ftrial, s, x);
      ftrial.pin_mean(fbar);
      const SweepStats st = eval_stress(ftrial);
      if (st.inadmissible_cells == 0) {
        const double rtrial = residual_from_stress(proj_);
        if (rtrial <= resid * (1.0 + 1e-12)) {
          accepted = true;
          break;
        }
      }
      s *= 0.5;
      ++rep.line_search_cuts;
    }
    if (!accepted) return false;
    f.data.swap(ftrial.data);
  }
  return false;
}

StepReport CellSolver::run_step(Field9& f, const Mat3& fbar, double t0,
                                double t1) {
  const auto tic = Clock::now();
  StepReport rep;
  rep.t_start = t0;
  rep.t_end = t1;
  rep.fbar = fbar;
  const bool ok = cfg_.scheme == Scheme::basic ? run_basic(f, fbar, rep)
                                               : run_newton(f, fbar, rep);
  rep.converged = ok;
  rep.seconds = seconds_since(tic);
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  if (eval == MaterialEval::dfmg && green != GreenKind::staggered)
    throw ConfigInvalid("solver: dfmg material evaluation requires the "
                        "staggered Green operator");
  if (load_steps < 1) throw ConfigInvalid("solver: load_steps must be >= 1");
  if (!(tol_equilibrium > 0.0))
    throw ConfigInvalid("solver: tol_equilibrium must be positive");
}

SolveResult solve(CellMaterials& cm, const Mat3& fbar_target,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (!(fbar_target.determinant() > 0.0))
    throw InadmissibleMacroState("solve: det(fbar) <= 0");
  set_threads(cfg.threads);

  const auto tic = Clock::now();
  CellSolver solver(cm, cfg);

  SolveResult out;
  out.f = Field9(cm.grid());

  const Mat3 h = fbar_target - Mat3::Identity();
  double t = 0.0;
  double dt = 1.0 / cfg.load_steps;
  Mat3 fbar_prev = Mat3::Identity();
  out.f.fill(Mat3::Identity());

  ConvergenceReport& report = out.report;
  report.success = true;

  while (t < 1.0 - 1e-12) {
    const double dt_try = std::min(dt, 1.0 - t);
    const Mat3 fbar = Mat3::Identity() + (t + dt_try) * h;

    // warm start: keep the fluctuation, shift the mean
    Field9 backup_f = out.f;
    const std::vector<Vec3> backup_warm = cm.warm_all();
    const std::vector<Vec3> backup_dfmg = solver.dfmg_state().warm_a;
    out.f.pin_mean(fbar);

    StepReport rep = solver.run_step(out.f, fbar, t, t + dt_try);
    if (rep.converged) {
      report.steps.push_back(std::move(rep));
      t += dt_try;
      fbar_prev = fbar;
      continue;
    }

    // failed: restore and bisect
    out.f = std::move(backup_f);
    out.f.pin_mean(fbar_prev);
    cm.warm_all() = backup_warm;
    solver.dfmg_state().warm_a = backup_dfmg;
    ++report.bisections;
    if (report.bisections > cfg.max_bisections) {
      report.steps.push_back(std::move(rep));
      report.success = false;
      report.error = "LoadPathFailed: bisection budget exhausted";
      break;
    }
    dt = 0.5 * dt_try;
  }

  report.alpha = solver.alpha();
  report.seconds_total = seconds_since(tic);
  out.p = solver.stress();
  out.pbar = solver.pbar();
  return out;
}

}  // namespace combo
