// End-to-end checks of the batch front-end: pipeline handoff, reproducible
// reports and the machine-readable error contract.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "combo/io.hpp"

using namespace combo;
namespace fs = std::filesystem;

namespace {

const fs::path kCli = COMBO_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Json strip_timings(Json j) {
  if (j.contains("report") && j["report"].contains("timings"))
    j["report"].erase("timings");
  if (j.contains("timings")) j.erase("timings");
  return j;
}

}  // namespace

TEST_CASE("pipeline stages hand off artifacts and reports reproduce") {
  const fs::path dir = fs::temp_directory_path() / "combo_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfgp = dir / "cfg.json";
  Json cfg;
  cfg["geometry"] = {{"shape", "sphere"}, {"radius", 0.4}};
  cfg["dims"] = {16, 16, 16};
  cfg["coarsen"] = {4, 4, 4};
  cfg["threads"] = 2;
  cfg["solver"] = {{"tol_equilibrium", 1e-8}};
  cfg["output"] = {{"dir", (dir / "out").string()}, {"dump_fields", true}};
  write_json(cfg, cfgp);
  const std::string base = "--config " + cfgp.string();

  REQUIRE(run("generate " + base) == 0);
  REQUIRE(fs::exists(dir / "out" / "image.json"));
  REQUIRE(run("coarsen " + base) == 0);
  REQUIRE(run("normals " + base) == 0);
  REQUIRE(run("solve " + base) == 0);
  REQUIRE(run("post " + base) == 0);
  REQUIRE(fs::exists(dir / "out" / "tractions.csv"));

  const Json rep1 = read_json(dir / "out" / "solve_report.json");
  // effective config re-runs to a byte-identical report modulo timings
  REQUIRE(run("solve --config " +
              (dir / "out" / "config_effective.solve.json").string()) == 0);
  const Json rep2 = read_json(dir / "out" / "solve_report.json");
  CHECK(strip_timings(rep1) == strip_timings(rep2));
  CHECK(rep1.contains("report"));
  CHECK(rep1["report"].contains("timings"));

  // the coarsen report carries the exact volume bookkeeping
  const Json crep = read_json(dir / "out" / "coarsen_report.json");
  CHECK(crep.at("volume_fraction_exact").get<bool>());

  // overrides reach the solver
  REQUIRE(run("solve " + base + " --override solver.scheme=basic" +
              " --override solver.max_outer=5000") == 0);
  const Json echo = read_json(dir / "out" / "config_effective.solve.json");
  CHECK(echo.at("solver").at("scheme").get<std::string>() == "basic");
}

TEST_CASE("failures exit nonzero with machine-readable JSON") {
  const fs::path dir = fs::temp_directory_path() / "combo_cli_err";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = kCli.string() + " post --out " + (dir / "o").string() +
                          " 2> " + (dir / "err.json").string() + " >/dev/null";
  CHECK(std::system(cmd.c_str()) != 0);
  const Json err = read_json(dir / "err.json");
  CHECK(err.at("error").at("type").get<std::string>() ==
        "UpstreamArtifactMissing");
  CHECK(!err.at("error").at("message").get<std::string>().empty());

  // invalid config key
  const fs::path bad = dir / "bad.json";
  write_json(Json{{"bogus_key", 1}}, bad);
  const std::string cmd2 = kCli.string() + " generate --config " + bad.string() +
                           " 2> " + (dir / "err2.json").string() + " >/dev/null";
  CHECK(std::system(cmd2.c_str()) != 0);
  CHECK(read_json(dir / "err2.json").at("error").at("type") == "ConfigInvalid");
}
