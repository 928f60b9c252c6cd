// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end: generate | coarsen | normals | solve | post | bench with a
// JSON config, file handoff between stages and reproducible outputs.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "combo/config.hpp"
#include "combo/postprocess.hpp"
#include "combo/solver.hpp"

namespace fs = std::filesystem;
using namespace combo;

namespace {

struct UpstreamArtifactMissing : Error {
  explicit UpstreamArtifactMissing(const std::string& what) : Error(what) {}
};

int log_level() {  // 0 quiet, 1 info, 2 debug
  const char* env = std::getenv("COMBO_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cout << msg << "\n";
}

struct Args {
  std::string config_path;
  std::string out_dir;
  int threads = -1;
  std::int64_t seed = -1;
  std::vector<std::string> overrides;
  std::string suite = "sphere-smoke";
};

RunConfig load_config(const Args& a, const std::string& stage) {
  Json j = Json::object();
  if (!a.config_path.empty()) j = read_json(a.config_path);
  for (const auto& ov : a.overrides) apply_override(j, ov);
  if (!a.out_dir.empty()) j["output"]["dir"] = a.out_dir;
  if (a.threads >= 0) j["threads"] = a.threads;
  if (a.seed >= 0) j["seed"] = static_cast<std::uint64_t>(a.seed);
  RunConfig cfg = RunConfig::from_json(j);
  set_threads(cfg.threads);
  fs::create_directories(cfg.out_dir);
  write_json(cfg.to_json(),
             fs::path(cfg.out_dir) / ("config_effective." + stage + ".json"));
  return cfg;
}

fs::path artifact(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.out_dir) / name;
}

PhaseImage obtain_image(const RunConfig& cfg) {
  if (!cfg.geometry.is_null() && cfg.geometry.contains("image"))
    return load_image(cfg.geometry.at("image").get<std::string>());
  const fs::path p = artifact(cfg, "image.json");
  if (fs::exists(p)) return load_image(p);
  throw UpstreamArtifactMissing(
      "no image found; run `generate` first or set geometry.image");
}

MaterialPtr material_or_default(const RunConfig& cfg, const char* key,
                                double e_default, double nu_default) {
  if (!cfg.materials.is_null() && cfg.materials.contains(key))
    return make_material(cfg.materials.at(key));
  return std::make_shared<NeoHookeanLaw>(
      NeoHookeanParams::from_enu(e_default, nu_default));
}

int cmd_generate(const Args& a) {
  const RunConfig cfg = load_config(a, "generate");
  if (cfg.geometry.is_null() || !cfg.geometry.contains("shape"))
    throw ConfigInvalid("generate: config needs geometry.shape");
  const PhaseImage img =
      generate_shape(cfg.geometry, cfg.dims, cfg.lengths, cfg.seed);
  save_image(img, artifact(cfg, "image.json"));
  Json rep;
  rep["dims"] = img.dims;
  rep["inclusion_count"] = img.inclusion_count();
  rep["inclusion_fraction"] = img.inclusion_fraction();
  write_json(rep, artifact(cfg, "generate_report.json"));
  info("inclusion volume fraction: " +
       std::to_string(img.inclusion_fraction()));
  return 0;
}

int cmd_coarsen(const Args& a) {
  const RunConfig cfg = load_config(a, "coarsen");
  const PhaseImage img = obtain_image(cfg);
  const ComboGrid grid = coarsen(img, cfg.coarsen_factors);
  save_grid(grid, artifact(cfg, "grid.json"));
  Json rep;
  rep["dims"] = grid.dims;
  rep["composite_boxels"] = grid.composite_count();
  rep["global_count_plus"] = grid.global_count_plus();
  rep["global_c_plus"] = grid.global_c_plus();
  rep["fine_count_plus"] = img.inclusion_count();
  rep["volume_fraction_exact"] =
      grid.global_count_plus() == img.inclusion_count();
  write_json(rep, artifact(cfg, "coarsen_report.json"));
  info("composite boxels: " + std::to_string(grid.composite_count()));
  info("global c_plus: " + std::to_string(grid.global_c_plus()));
  return 0;
}

int cmd_normals(const Args& a) {
  const RunConfig cfg = load_config(a, "normals");
  const fs::path gp = artifact(cfg, "grid.json");
  if (!fs::exists(gp))
    throw UpstreamArtifactMissing("no grid.json; run `coarsen` first");
  const PhaseImage img = obtain_image(cfg);
  ComboGrid grid = load_grid(gp);
  const NormalStats st =
      compute_normals(img, grid, cfg.normal_method, cfg.normal_options);
  save_grid(grid, gp);
  Json rep;
  rep["composite"] = st.composite;
  rep["degenerate_fallbacks"] = st.degenerate_fallbacks;
  rep["too_few_fallbacks"] = st.too_few_fallbacks;

  // colinearity report when the geometry carries an analytic normal
  if (!cfg.geometry.is_null() && cfg.geometry.contains("shape")) {
    const std::string shape = cfg.geometry.at("shape").get<std::string>();
    std::function<Vec3(const Vec3&)> oracle;
    if (shape == "sphere" || shape == "octahedron") {
      const Vec3 c(0.5 * cfg.lengths[0], 0.5 * cfg.lengths[1],
                   0.5 * cfg.lengths[2]);
      if (shape == "sphere")
        oracle = [c](const Vec3& x) { return Vec3((x - c).normalized()); };
      else
        oracle = [c](const Vec3& x) {
          Vec3 s = (x - c).cwiseSign();
          return Vec3(s.normalized());
        };
    } else if (shape == "slab" || shape == "fiber") {
      const int axis = shape == "slab" ? cfg.geometry.at("axis").get<int>() : 0;
      const Vec3 c(0.5 * cfg.lengths[0], 0.5 * cfg.lengths[1],
                   0.5 * cfg.lengths[2]);
      oracle = [c, axis, shape, &cfg](const Vec3& x) {
        if (shape == "slab") {
          Vec3 n = Vec3::Zero();
          n[axis] = x[axis] > c[axis] ? 1.0 : -1.0;
          return n;
        }
        Vec3 r = x - c;
        r[cfg.geometry.at("axis").get<int>()] = 0.0;
        return Vec3(r.normalized());
      };
    }
    if (oracle) {
      const WeightField w = laplace_weights(img, cfg.normal_options.conv);
      const auto anchors = interface_centroids(img, grid, w);
      const Colinearity col = colinearity_stats(grid, anchors, oracle);
      rep["colinearity"] = {{"mean", col.mean},
                           {"min", col.min},
                           {"count", col.count}};
      info("mean colinearity vs analytic normals: " +
           std::to_string(col.mean));
    }
  }
  write_json(rep, artifact(cfg, "normals_report.json"));
  return 0;
}

Json run_solve(const RunConfig& cfg, SolveResult& out, CellMaterials& cm) {
  SolverConfig scfg = cfg.solver;
  scfg.threads = cfg.threads;
  out = solve(cm, cfg.loading, scfg);
  if (!out.report.success) throw Error("SolverFailed: " + out.report.error);

  RecoveredFields rec = recover_phase_fields(out.f, cm);
  const PhaseAverages pa = phase_averages(out.f, cm, rec);
  Json rep;
  rep["averages"] = phase_averages_to_json(pa);
  rep["report"] = report_to_json(out.report);
  return rep;
}

int cmd_solve(const Args& a) {
  const RunConfig cfg = load_config(a, "solve");
  const fs::path gp = artifact(cfg, "grid.json");
  if (!fs::exists(gp))
    throw UpstreamArtifactMissing("no grid.json; run `coarsen`/`normals` first");
  const ComboGrid grid = load_grid(gp);
  CellMaterials cm(grid, material_or_default(cfg, "matrix", 1.0, 0.0),
                   material_or_default(cfg, "inclusion", 10.0, 0.3), cfg.combo,
                   cfg.laminate);
  SolveResult res;
  const Json rep = run_solve(cfg, res, cm);
  write_json(rep, artifact(cfg, "solve_report.json"));
  if (cfg.dump_fields) {
    save_field(res.f, artifact(cfg, "F.json"));
    save_field(res.p, artifact(cfg, "P.json"));
  }
  info("pbar: " + mat3_to_json(res.pbar).dump());
  return 0;
}

int cmd_post(const Args& a) {
  const RunConfig cfg = load_config(a, "post");
  const fs::path gp = artifact(cfg, "grid.json");
  const fs::path fp = artifact(cfg, "F.json");
  if (!fs::exists(gp))
    throw UpstreamArtifactMissing("no grid.json; run the pipeline first");
  if (!fs::exists(fp))
    throw UpstreamArtifactMissing(
        "no F.json; run `solve` with output.dump_fields=true");
  const ComboGrid grid = load_grid(gp);
  const Field9 f = load_field(fp);
  CellMaterials cm(grid, material_or_default(cfg, "matrix", 1.0, 0.0),
                   material_or_default(cfg, "inclusion", 10.0, 0.3), cfg.combo,
                   cfg.laminate);
  const RecoveredFields rec = recover_phase_fields(f, cm);
  const PhaseAverages pa = phase_averages(f, cm, rec);
  write_json(phase_averages_to_json(pa), artifact(cfg, "averages.json"));

  const auto facets = facet_export(grid);
  const auto samples = interface_tractions(rec, cm, facets, grid);
  write_traction_csv(samples, artifact(cfg, "tractions.csv"));

  int count = 0;
  for (const auto& s : cfg.slices) {
    const int comp = s.value("component", 1);
    const int axis = s.value("axis", 2);
    const std::int64_t index = s.value("index", 0);
    save_slice(f, comp, axis, index,
               artifact(cfg, "slice_" + std::to_string(count++) + ".json"));
  }
  info("tractions: " + std::to_string(samples.size()) + " facets");
  return 0;
}

// --------------------------------------------------------------------------
// bench: desk-scale reruns emitting comparison tables

struct BenchRow {
  std::string label;
  Mat3 pbar, pbar_plus, pbar_minus;
  double seconds;
};

void emit_table(const std::vector<BenchRow>& rows, std::size_t ref_index,
                const fs::path& csv) {
  std::ofstream f(csv);
  f << "label,XX,XY,YX,YY,err_pbar_pct,err_plus_pct,err_minus_pct,seconds\n";
  f.precision(10);
  const BenchRow& ref = rows[ref_index];
  std::cout << "\n  label                          P_XX     P_XY     P_YX     "
               "P_YY   err%\n";
  for (const auto& r : rows) {
    const double e = error_norm(r.pbar, ref.pbar) * 100.0;
    const double ep = error_norm(r.pbar_plus, ref.pbar_plus) * 100.0;
    const double em = error_norm(r.pbar_minus, ref.pbar_minus) * 100.0;
    f << r.label << ',' << r.pbar(0, 0) << ',' << r.pbar(0, 1) << ','
      << r.pbar(1, 0) << ',' << r.pbar(1, 1) << ',' << e << ',' << ep << ','
      << em << ',' << r.seconds << "\n";
    std::printf("  %-28s %8.4f %8.4f %8.4f %8.4f %6.3f\n", r.label.c_str(),
                r.pbar(0, 0), r.pbar(0, 1), r.pbar(1, 0), r.pbar(1, 1), e);
  }
  std::cout << "\n";
}

BenchRow bench_run(const std::string& label, const ComboGrid& grid,
                   MaterialPtr matrix, MaterialPtr inclusion, bool combo,
                   const Mat3& loading, const SolverConfig& scfg) {
  CellMaterials cm(grid, std::move(matrix), std::move(inclusion), combo);
  SolveResult r = solve(cm, loading, scfg);
  if (!r.report.success) throw Error("SolverFailed in bench: " + label);
  const RecoveredFields rec = recover_phase_fields(r.f, cm);
  const PhaseAverages pa = phase_averages(r.f, cm, rec);
  BenchRow row;
  row.label = label;
  row.pbar = pa.pbar;
  row.pbar_plus = pa.has_plus ? pa.pbar_plus : Mat3::Zero();
  row.pbar_minus = pa.has_minus ? pa.pbar_minus : Mat3::Zero();
  row.seconds = r.report.seconds_total;
  return row;
}

int cmd_bench(const Args& a) {
  const RunConfig cfg = load_config(a, "bench");
  const fs::path out(cfg.out_dir);
  Mat3 loading = Mat3::Identity();
  loading(0, 1) = 0.5;

  MaterialPtr soft =
      std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(1.0, 0.0));
  MaterialPtr stiff =
      std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(10.0, 0.3));

  SolverConfig ref_cfg;
  ref_cfg.scheme = Scheme::newton_cg;
  ref_cfg.green = GreenKind::rotated;
  ref_cfg.tol_equilibrium = 1e-7;
  ref_cfg.load_steps = 2;
  ref_cfg.threads = cfg.threads;

  auto sphere_suite = [&](std::int64_t fine, const std::string& tag) {
    info("generating sphere at " + std::to_string(fine) + "^3");
    const auto img = generate_sphere({fine, fine, fine}, {1, 1, 1}, 0.4);
    std::vector<BenchRow> rows;
    {
      const ComboGrid g = coarsen(img, {1, 1, 1});
      rows.push_back(bench_run("ref " + std::to_string(fine) + "^3 (no combo)",
                               g, soft, stiff, false, loading, ref_cfg));
    }
    const std::array<std::array<std::int64_t, 3>, 2> factorsets = {
        std::array<std::int64_t, 3>{fine / 16, fine / 16, fine / 16},
        std::array<std::int64_t, 3>{fine / 8, fine / 16, fine / 32}};
    for (const auto& fac : factorsets) {
      auto g = coarsen(img, fac);
      const std::string res = std::to_string(g.dims[0]) + "x" +
                              std::to_string(g.dims[1]) + "x" +
                              std::to_string(g.dims[2]);
      for (auto method :
           {NormalMethod::barycenter, NormalMethod::second_moment}) {
        compute_normals(img, g, method);
        const std::string m =
            method == NormalMethod::barycenter ? "barycenter" : "second-moment";
        rows.push_back(bench_run("combo " + res + " " + m, g, soft, stiff,
                                 true, loading, ref_cfg));
      }
    }
    emit_table(rows, 0, out / ("bench_sphere_" + tag + ".csv"));
  };

  if (a.suite == "sphere-desk") {
    sphere_suite(128, "desk");
  } else if (a.suite == "sphere-smoke") {
    sphere_suite(64, "smoke");
  } else if (a.suite == "octahedron-desk") {
    const auto img = generate_octahedron({128, 128, 128}, {1, 1, 1}, 0.4);
    std::vector<BenchRow> rows;
    rows.push_back(bench_run("ref 128^3 (no combo)", coarsen(img, {1, 1, 1}),
                             soft, stiff, false, loading, ref_cfg));
    auto g = coarsen(img, {8, 8, 8});
    compute_normals(img, g, NormalMethod::second_moment);
    rows.push_back(
        bench_run("combo 16^3", g, soft, stiff, true, loading, ref_cfg));
    rows.push_back(bench_run("staircase 16^3 (combo off)", g, soft, stiff,
                             false, loading, ref_cfg));
    emit_table(rows, 0, out / "bench_octahedron.csv");
    info("exact c+: " + std::to_string(g.global_c_plus()));
    CellMaterials off(g, soft, stiff, false);
    info("staircase c+: " + std::to_string(off.represented_c_plus()));
  } else if (a.suite == "crossply-desk") {
    const auto img =
        generate_cross_ply({100, 100, 100}, {1, 1, 1}, 0.1, 0.25, 4);
    std::vector<BenchRow> rows;
    rows.push_back(bench_run("ref 100^3 (no combo)", coarsen(img, {1, 1, 1}),
                             soft, stiff, false, loading, ref_cfg));
    auto g = coarsen(img, {4, 4, 4});
    compute_normals(img, g, NormalMethod::second_moment);
    rows.push_back(
        bench_run("combo 25^3", g, soft, stiff, true, loading, ref_cfg));
    emit_table(rows, 0, out / "bench_crossply.csv");
  } else if (a.suite == "fiber-desk") {
    const auto img = generate_fiber_pack({126, 126, 126}, {1, 1, 1}, cfg.seed,
                                         30, 0.03, 0.5, 0.25);
    info("fiber fraction: " + std::to_string(img.inclusion_fraction()));
    std::vector<BenchRow> rows;
    rows.push_back(bench_run("ref 126^3 (no combo)", coarsen(img, {1, 1, 1}),
                             soft, stiff, false, loading, ref_cfg));
    for (const auto& fac : {std::array<std::int64_t, 3>{6, 6, 6},
                            std::array<std::int64_t, 3>{9, 3, 3}}) {
      auto g = coarsen(img, fac);
      compute_normals(img, g, NormalMethod::second_moment);
      const std::string res = std::to_string(g.dims[0]) + "x" +
                              std::to_string(g.dims[1]) + "x" +
                              std::to_string(g.dims[2]);
      rows.push_back(
          bench_run("combo " + res, g, soft, stiff, true, loading, ref_cfg));
    }
    emit_table(rows, 0, out / "bench_fiber.csv");
  } else {
    throw ConfigInvalid("unknown bench suite \"" + a.suite + "\"");
  }
  return 0;
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigInvalid*>(&e)) return "ConfigInvalid";
  if (dynamic_cast<const UpstreamArtifactMissing*>(&e))
    return "UpstreamArtifactMissing";
  if (dynamic_cast<const BadShapeSpec*>(&e)) return "BadShapeSpec";
  if (dynamic_cast<const NonDividingFactor*>(&e)) return "NonDividingFactor";
  if (dynamic_cast<const IOFailure*>(&e)) return "IOFailure";
  if (dynamic_cast<const LoadPathFailed*>(&e)) return "LoadPathFailed";
  if (dynamic_cast<const InadmissibleMacroState*>(&e))
    return "InadmissibleMacroState";
  if (dynamic_cast<const Error*>(&e)) return "SolverFailed";
  return "InternalError";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FFT-based homogenization with composite boxels"};
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON config path");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--threads", args.threads, "thread count");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--override", args.overrides,
                    "config override key.path=value (repeatable)");
  };

  auto* c_gen = app.add_subcommand("generate", "generate a voxel image");
  auto* c_coa = app.add_subcommand("coarsen", "coarse-grain into boxels");
  auto* c_nor = app.add_subcommand("normals", "interface normals");
  auto* c_sol = app.add_subcommand("solve", "run the cell solver");
  auto* c_pos = app.add_subcommand("post", "post-process a solution");
  auto* c_ben = app.add_subcommand("bench", "desk-scale benchmark suites");
  for (auto* c : {c_gen, c_coa, c_nor, c_sol, c_pos, c_ben}) add_common(c);
  c_ben->add_option("--suite", args.suite,
                    "sphere-smoke | sphere-desk | octahedron-desk | "
                    "crossply-desk | fiber-desk");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gen->parsed()) return cmd_generate(args);
    if (c_coa->parsed()) return cmd_coarsen(args);
    if (c_nor->parsed()) return cmd_normals(args);
    if (c_sol->parsed()) return cmd_solve(args);
    if (c_pos->parsed()) return cmd_post(args);
    if (c_ben->parsed()) return cmd_bench(args);
  } catch (const std::exception& e) {
    Json err;
    err["error"] = {{"type", error_type(e)}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
