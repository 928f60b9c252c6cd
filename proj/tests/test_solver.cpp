#include <doctest.h>

#include <cmath>

#include "combo/postprocess.hpp"
#include "combo/solver.hpp"
#include "oracles.hpp"

using namespace combo;

namespace {

MaterialPtr stiff() {
  return std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(10.0, 0.3));
}
MaterialPtr soft() {
  return std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(1.0, 0.0));
}

Mat3 shear(double g) {
  Mat3 f = Mat3::Identity();
  f(0, 1) = g;
  return f;
}

ComboGrid homogeneous_grid(std::int64_t n) {
  PhaseImage img;
  img.dims = {n, n, n};
  img.lengths = {1, 1, 1};
  img.data.assign(static_cast<std::size_t>(n * n * n), 0);
  return coarsen(img, {1, 1, 1});
}

ComboGrid sphere_combo_grid(std::int64_t fine, std::int64_t factor) {
  const auto img = generate_sphere({fine, fine, fine}, {1, 1, 1}, 0.4);
  auto grid = coarsen(img, {factor, factor, factor});
  compute_normals(img, grid, NormalMethod::second_moment);
  return grid;
}

}  // namespace

TEST_CASE("homogeneous problems converge in one outer iteration, F = Fbar") {
  const ComboGrid grid = homogeneous_grid(8);
  const Mat3 fbar = shear(0.5);
  struct Combo {
    Scheme s;
    GreenKind g;
    MaterialEval e;
  };
  const Combo combos[] = {
      {Scheme::basic, GreenKind::continuous, MaterialEval::per_cell},
      {Scheme::basic, GreenKind::rotated, MaterialEval::per_cell},
      {Scheme::basic, GreenKind::staggered, MaterialEval::per_cell},
      {Scheme::basic, GreenKind::staggered, MaterialEval::dfmg},
      {Scheme::newton_cg, GreenKind::continuous, MaterialEval::per_cell},
      {Scheme::newton_cg, GreenKind::rotated, MaterialEval::per_cell},
      {Scheme::newton_cg, GreenKind::staggered, MaterialEval::per_cell},
      {Scheme::newton_cg, GreenKind::staggered, MaterialEval::dfmg},
  };
  for (const auto& c : combos) {
    CellMaterials cm(grid, soft(), stiff(), true);
    SolverConfig cfg;
    cfg.scheme = c.s;
    cfg.green = c.g;
    cfg.eval = c.e;
    const SolveResult r = solve(cm, fbar, cfg);
    REQUIRE(r.report.success);
    CHECK(r.report.steps.size() == 1);
    CHECK(r.report.steps[0].outer_iters == 1);
    double dev = 0.0;
    for (std::int64_t i = 0; i < r.f.cells(); ++i)
      dev = std::max(dev, (r.f.cell(static_cast<std::size_t>(i)) - fbar).norm());
    CHECK(dev <= 1e-12);
    // pbar equals the pointwise law at fbar
    Mat3 pref;
    REQUIRE(cm.matrix().eval(fbar, pref));
    CHECK((r.pbar - pref).norm() <= 1e-12 * pref.norm());
  }
}

TEST_CASE("axis-aligned laminate RVE reproduces the laminate kernel") {
  // 2x1x1 cells, inclusion in cell 0, matrix in cell 1, interface normal e1
  PhaseImage img;
  img.dims = {2, 1, 1};
  img.lengths = {1, 1, 1};
  img.data = {1, 0};
  const ComboGrid grid = coarsen(img, {1, 1, 1});

  SUBCASE("finite strain, Neo-Hooke") {
    // the 2-cell axis puts all physics into the Nyquist mode, which only the
    // difference-based operators (real symbols) represent
    const Mat3 fbar = shear(0.5);
    for (auto green : {GreenKind::rotated, GreenKind::staggered}) {
      CellMaterials cm(grid, soft(), stiff(), true);
      SolverConfig cfg;
      cfg.scheme = Scheme::newton_cg;
      cfg.green = green;
      cfg.tol_equilibrium = 1e-12;
      const SolveResult r = solve(cm, fbar, cfg);
      REQUIRE(r.report.success);

      const ComboMeta meta = ComboMeta::make(Vec3::UnitX(), 0.5);
      LaminateOptions lo;
      lo.tol_rel = 1e-13;
      const LaminateSolution lam =
          finite_strain_solve(fbar, *stiff(), *soft(), meta, Vec3::Zero(), lo);
      REQUIRE(lam.state.converged);
      CHECK((r.pbar - lam.result.p_box).norm() <=
            1e-9 * lam.result.p_box.norm());
      // the two cells carry F+ and F-
      const Mat3 f0 = r.f.cell(0);
      const Mat3 f1 = r.f.cell(1);
      CHECK((f0 - lam.result.f_plus).norm() <= 1e-8);
      CHECK((f1 - lam.result.f_minus).norm() <= 1e-8);
    }
  }

  SUBCASE("small strain, linear elasticity") {
    const Mat6 cp = oracle::iso_mandel(5.769230769230769, 3.846153846153846);
    const Mat6 cm6 = oracle::iso_mandel(0.0, 0.5);
    const Mat3 h = 1e-4 * shear(1.0) - 1e-4 * Mat3::Identity() * 0.3;
    const Mat3 fbar = Mat3::Identity() + h;
    CellMaterials cm(grid,
                     std::make_shared<LinearElasticLaw>(LinearElasticParams{cm6}),
                     std::make_shared<LinearElasticLaw>(LinearElasticParams{cp}),
                     true);
    SolverConfig cfg;
    cfg.scheme = Scheme::newton_cg;
    cfg.green = GreenKind::rotated;
    // residual noise floor for 1e-4 strains sits near 1e-12 relative
    cfg.tol_equilibrium = 1e-10;
    cfg.cg_tol = 1e-10;
    const SolveResult r = solve(cm, fbar, cfg);
    REQUIRE(r.report.success);
    const ComboMeta meta = ComboMeta::make(Vec3::UnitX(), 0.5);
    const Mat6 cbox = small_strain_stiffness(cp, cm6, meta);
    const Mat3 eps = 0.5 * (h + h.transpose());
    const Mat3 pref = from_mandel(cbox * to_mandel(eps));
    CHECK((r.pbar - pref).norm() <= 1e-8 * pref.norm());
  }
}

TEST_CASE("basic scheme agrees with Newton-CG on the sphere") {
  const ComboGrid grid = sphere_combo_grid(32, 2);  // 16^3 combo grid
  const Mat3 fbar = shear(0.3);

  CellMaterials cm_a(grid, soft(), stiff(), true);
  SolverConfig ca;
  ca.scheme = Scheme::basic;
  ca.green = GreenKind::continuous;
  ca.tol_equilibrium = 1e-9;
  ca.max_outer = 2000;
  const SolveResult ra = solve(cm_a, fbar, ca);
  REQUIRE(ra.report.success);
  for (const auto& step : ra.report.steps)
    for (std::size_t i = 1; i < step.residuals.size(); ++i)
      CHECK(step.residuals[i] <= step.residuals[i - 1] * (1.0 + 1e-10));

  CellMaterials cm_b(grid, soft(), stiff(), true);
  SolverConfig cb;
  cb.scheme = Scheme::newton_cg;
  cb.green = GreenKind::continuous;
  cb.tol_equilibrium = 1e-9;
  const SolveResult rb = solve(cm_b, fbar, cb);
  REQUIRE(rb.report.success);

  CHECK(error_norm(ra.pbar, rb.pbar) <= 1e-5);
}

TEST_CASE("linear problem: one productive Newton step") {
  const ComboGrid grid = sphere_combo_grid(16, 2);
  const Mat6 cp = oracle::iso_mandel(3.0, 2.0);
  const Mat6 cm6 = oracle::iso_mandel(1.0, 0.5);
  CellMaterials cm(grid,
                   std::make_shared<LinearElasticLaw>(LinearElasticParams{cm6}),
                   std::make_shared<LinearElasticLaw>(LinearElasticParams{cp}),
                   true);
  SolverConfig cfg;
  cfg.scheme = Scheme::newton_cg;
  cfg.green = GreenKind::continuous;
  cfg.tol_equilibrium = 1e-7;
  cfg.cg_tol = 1e-12;  // solve the linear system tightly in one go
  const SolveResult r = solve(cm, Mat3::Identity() + 1e-3 * shear(1.0) -
                                      Mat3::Identity() * 0.0,
                              cfg);
  REQUIRE(r.report.success);
  CHECK(r.report.steps[0].outer_iters == 2);
  CHECK(r.report.steps[0].cg_iters.back() == 0);
}

TEST_CASE("load stepping: path independence and warm starts") {
  const ComboGrid grid = sphere_combo_grid(16, 2);
  const Mat3 fbar = shear(0.4);

  CellMaterials cm1(grid, soft(), stiff(), true);
  SolverConfig c1;
  c1.tol_equilibrium = 1e-10;
  c1.load_steps = 1;
  const SolveResult r1 = solve(cm1, fbar, c1);
  REQUIRE(r1.report.success);

  CellMaterials cm3(grid, soft(), stiff(), true);
  SolverConfig c3 = c1;
  c3.load_steps = 3;
  const SolveResult r3 = solve(cm3, fbar, c3);
  REQUIRE(r3.report.success);
  CHECK(r3.report.steps.size() == 3);

  CHECK(error_norm(r3.pbar, r1.pbar) <= 1e-8);
}

TEST_CASE("newton residual history is monotone per accepted iteration") {
  const ComboGrid grid = sphere_combo_grid(16, 2);
  CellMaterials cm(grid, soft(), stiff(), true);
  SolverConfig cfg;
  cfg.tol_equilibrium = 1e-10;
  const SolveResult r = solve(cm, shear(0.5), cfg);
  REQUIRE(r.report.success);
  for (const auto& step : r.report.steps)
    for (std::size_t i = 1; i < step.residuals.size(); ++i)
      CHECK(step.residuals[i] <= step.residuals[i - 1] * (1.0 + 1e-10));
}

TEST_CASE("solver reruns are bitwise identical") {
  const ComboGrid grid = sphere_combo_grid(16, 2);
  auto run = [&]() {
    CellMaterials cm(grid, soft(), stiff(), true);
    SolverConfig cfg;
    cfg.tol_equilibrium = 1e-9;
    return solve(cm, shear(0.5), cfg);
  };
  const SolveResult a = run();
  const SolveResult b = run();
  CHECK(a.pbar == b.pbar);
  REQUIRE(a.report.steps.size() == b.report.steps.size());
  for (std::size_t s = 0; s < a.report.steps.size(); ++s)
    CHECK(a.report.steps[s].residuals == b.report.steps[s].residuals);
  CHECK(a.f.data == b.f.data);
}

TEST_CASE("combo switch: exact vs majority volume fraction") {
  const auto img = generate_sphere({32, 32, 32}, {1, 1, 1}, 0.4);
  auto grid = coarsen(img, {4, 4, 4});
  compute_normals(img, grid, NormalMethod::second_moment);
  const double exact = grid.global_c_plus();

  CellMaterials on(grid, soft(), stiff(), true);
  CellMaterials off(grid, soft(), stiff(), false);
  CHECK(std::abs(on.represented_c_plus() - exact) <= 1e-13);
  CHECK(std::abs(off.represented_c_plus() - exact) > 1e-4);
}

TEST_CASE("bisection recovers an aggressive single-step load") {
  const ComboGrid grid = sphere_combo_grid(16, 2);
  CellMaterials cm(grid, soft(), stiff(), true);
  SolverConfig cfg;
  cfg.tol_equilibrium = 1e-8;
  cfg.load_steps = 1;
  cfg.max_outer = 5;  // too few for the full step, enough for the halves
  const SolveResult r = solve(cm, shear(0.8), cfg);
  CHECK(r.report.success);
  CHECK(r.report.bisections >= 1);
}

TEST_CASE("dfmg laminate stress approaches the continuous-operator result") {
  // axis-aligned two-phase laminate: the dfmg average stress lands within 1%
  // of the continuous-operator reference once the interface layer is thin
  const auto img = generate_slab({128, 2, 2}, {1, 1, 1}, 0, 0.5);
  const ComboGrid grid = coarsen(img, {1, 1, 1});
  const Mat3 fbar = shear(0.5);

  CellMaterials cm_ref(grid, soft(), stiff(), false);
  SolverConfig ref_cfg;
  ref_cfg.green = GreenKind::continuous;
  ref_cfg.tol_equilibrium = 1e-10;
  const SolveResult ref = solve(cm_ref, fbar, ref_cfg);
  REQUIRE(ref.report.success);

  CellMaterials cm_dfmg(grid, soft(), stiff(), false);
  SolverConfig dcfg;
  dcfg.green = GreenKind::staggered;
  dcfg.eval = MaterialEval::dfmg;
  dcfg.tol_equilibrium = 1e-10;
  const SolveResult dfmg = solve(cm_dfmg, fbar, dcfg);
  REQUIRE(dfmg.report.success);

  CHECK(error_norm(dfmg.pbar, ref.pbar) <= 0.01);
}

TEST_CASE("c_min ablation reassigns extreme boxels") {
  const auto img = generate_sphere({32, 32, 32}, {1, 1, 1}, 0.4);
  auto grid = coarsen(img, {4, 4, 4});
  compute_normals(img, grid, NormalMethod::second_moment);
  LaminateOptions lam;
  lam.c_min = 0.0;
  CellMaterials all(grid, soft(), stiff(), true, lam);
  lam.c_min = 0.25;
  CellMaterials fewer(grid, soft(), stiff(), true, lam);
  CHECK(fewer.composite_cells() < all.composite_cells());
  CHECK(fewer.composite_cells() > 0);
}

TEST_CASE("basic scheme reproduces the laminate kernel on the voxel pair") {
  PhaseImage img;
  img.dims = {2, 1, 1};
  img.lengths = {1, 1, 1};
  img.data = {1, 0};
  const ComboGrid grid = coarsen(img, {1, 1, 1});
  CellMaterials cm(grid, soft(), stiff(), true);
  SolverConfig cfg;
  cfg.scheme = Scheme::basic;
  cfg.green = GreenKind::rotated;
  cfg.tol_equilibrium = 1e-11;
  cfg.max_outer = 20000;
  const SolveResult r = solve(cm, shear(0.5), cfg);
  REQUIRE(r.report.success);
  const ComboMeta meta = ComboMeta::make(Vec3::UnitX(), 0.5);
  LaminateOptions lo;
  lo.tol_rel = 1e-13;
  const LaminateSolution lam = finite_strain_solve(
      shear(0.5), *stiff(), *soft(), meta, Vec3::Zero(), lo);
  CHECK(error_norm(r.pbar, lam.result.p_box) <= 1e-8);
}
