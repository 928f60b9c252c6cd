// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/io.hpp"

#include <fstream>

#include "combo/errors.hpp"

namespace combo {

namespace {

namespace fs = std::filesystem;

void write_raw(const fs::path& path, const void* data, std::size_t bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOFailure("cannot open for writing: " + path.string());
  f.write(static_cast<const char*>(data),
          static_cast<std::streamsize>(bytes));
  if (!f) throw IOFailure("short write: " + path.string());
}

void read_raw(const fs::path& path, void* data, std::size_t bytes) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOFailure("cannot open for reading: " + path.string());
  f.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (f.gcount() != static_cast<std::streamsize>(bytes))
    throw IOFailure("short read: " + path.string());
}

fs::path sibling(const fs::path& json_path, const std::string& suffix) {
  fs::path p = json_path;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

void save_image(const PhaseImage& img, const fs::path& json_path) {
  const fs::path raw = sibling(json_path, ".raw");
  Json j;
  j["dims"] = img.dims;
  j["lengths"] = img.lengths;
  j["dtype"] = "u8";
  j["order"] = "C, k fastest";
  j["endianness"] = "little";
  j["data"] = raw.filename().string();
  write_json(j, json_path);
  write_raw(raw, img.data.data(), img.data.size());
}

PhaseImage load_image(const fs::path& json_path) {
  const Json j = read_json(json_path);
  PhaseImage img;
  img.dims = j.at("dims").get<std::array<std::int64_t, 3>>();
  img.lengths = j.at("lengths").get<std::array<double, 3>>();
  if (j.at("dtype").get<std::string>() != "u8")
    throw IOFailure("image: unsupported dtype");
  img.data.resize(static_cast<std::size_t>(img.size()));
  read_raw(json_path.parent_path() / j.at("data").get<std::string>(),
           img.data.data(), img.data.size());
  return img;
}

void save_grid(const ComboGrid& grid, const fs::path& json_path) {
  const auto n = static_cast<std::size_t>(grid.boxel_count());
  Json j;
  j["dims"] = grid.dims;
  j["factors"] = grid.factors;
  j["lengths"] = grid.lengths;
  j["global_count_plus"] = grid.global_count_plus();
  j["fine_voxels"] = grid.boxel_count() * grid.fine_per_boxel();
  j["composite_count"] = grid.composite_count();
  j["arrays"] = {{"kind", sibling(json_path, ".kind.raw").filename().string()},
                 {"c_plus", sibling(json_path, ".c_plus.raw").filename().string()},
                 {"normals", sibling(json_path, ".normals.raw").filename().string()}};
  write_json(j, json_path);

  std::vector<std::uint8_t> kinds(n);
  for (std::size_t i = 0; i < n; ++i)
    kinds[i] = static_cast<std::uint8_t>(grid.kind[i]);
  write_raw(sibling(json_path, ".kind.raw"), kinds.data(), n);
  write_raw(sibling(json_path, ".c_plus.raw"), grid.c_plus.data(),
            n * sizeof(double));
  std::vector<double> normals(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) normals[3 * i + static_cast<std::size_t>(a)] =
        grid.normal[i][a];
  write_raw(sibling(json_path, ".normals.raw"), normals.data(),
            3 * n * sizeof(double));
}

ComboGrid load_grid(const fs::path& json_path) {
  const Json j = read_json(json_path);
  ComboGrid g;
  g.dims = j.at("dims").get<std::array<std::int64_t, 3>>();
  g.factors = j.at("factors").get<std::array<std::int64_t, 3>>();
  g.lengths = j.at("lengths").get<std::array<double, 3>>();
  const auto n = static_cast<std::size_t>(g.boxel_count());
  const fs::path dir = json_path.parent_path();

  std::vector<std::uint8_t> kinds(n);
  read_raw(dir / j.at("arrays").at("kind").get<std::string>(), kinds.data(), n);
  g.kind.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.kind[i] = static_cast<BoxelKind>(kinds[i]);

  g.c_plus.resize(n);
  read_raw(dir / j.at("arrays").at("c_plus").get<std::string>(),
           g.c_plus.data(), n * sizeof(double));

  std::vector<double> normals(3 * n);
  read_raw(dir / j.at("arrays").at("normals").get<std::string>(),
           normals.data(), 3 * n * sizeof(double));
  g.normal.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.normal[i] = Vec3(normals[3 * i], normals[3 * i + 1], normals[3 * i + 2]);

  // integer counts are exactly recoverable from the rational c_plus
  const double vol = static_cast<double>(g.fine_per_boxel());
  g.count_plus.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.count_plus[i] = static_cast<std::int64_t>(std::llround(g.c_plus[i] * vol));
  g.normal_flag.assign(n, normal_none);
  return g;
}

void save_field(const Field9& f, const fs::path& json_path) {
  Json j;
  j["dims"] = f.grid.dims;
  j["lengths"] = f.grid.lengths;
  j["dtype"] = "f64";
  j["components"] = 9;
  j["order"] = "component-major; per component C, k fastest";
  j["endianness"] = "little";
  j["data"] = sibling(json_path, ".raw").filename().string();
  write_json(j, json_path);
  write_raw(sibling(json_path, ".raw"), f.data.data(),
            f.data.size() * sizeof(double));
}

Field9 load_field(const fs::path& json_path) {
  const Json j = read_json(json_path);
  SimGrid g;
  g.dims = j.at("dims").get<std::array<std::int64_t, 3>>();
  g.lengths = j.at("lengths").get<std::array<double, 3>>();
  Field9 f(g);
  read_raw(json_path.parent_path() / j.at("data").get<std::string>(),
           f.data.data(), f.data.size() * sizeof(double));
  return f;
}

void save_slice(const Field9& f, int comp, int axis, std::int64_t index,
                const fs::path& json_path) {
  const auto& d = f.grid.dims;
  if (axis < 0 || axis > 2 || index < 0 ||
      index >= d[static_cast<std::size_t>(axis)])
    throw IOFailure("slice: axis/index out of range");
  std::array<std::int64_t, 2> plane_dims{};
  std::vector<double> plane;
  const double* src = f.comp(comp);
  auto at = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return src[(i * d[1] + j) * d[2] + k];
  };
  if (axis == 0) {
    plane_dims = {d[1], d[2]};
    for (std::int64_t j = 0; j < d[1]; ++j)
      for (std::int64_t k = 0; k < d[2]; ++k)
        plane.push_back(at(index, j, k));
  } else if (axis == 1) {
    plane_dims = {d[0], d[2]};
    for (std::int64_t i = 0; i < d[0]; ++i)
      for (std::int64_t k = 0; k < d[2]; ++k)
        plane.push_back(at(i, index, k));
  } else {
    plane_dims = {d[0], d[1]};
    for (std::int64_t i = 0; i < d[0]; ++i)
      for (std::int64_t j = 0; j < d[1]; ++j)
        plane.push_back(at(i, j, index));
  }
  Json j;
  j["dims"] = plane_dims;
  j["dtype"] = "f64";
  j["component"] = comp;
  j["axis"] = axis;
  j["index"] = index;
  j["endianness"] = "little";
  j["data"] = sibling(json_path, ".raw").filename().string();
  write_json(j, json_path);
  write_raw(sibling(json_path, ".raw"), plane.data(),
            plane.size() * sizeof(double));
}

Json mat3_to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json r = Json::array();
    for (int j = 0; j < 3; ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Mat3 mat3_from_json(const Json& j) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c)
      m(i, c) = j.at(static_cast<std::size_t>(i))
                    .at(static_cast<std::size_t>(c))
                    .get<double>();
  return m;
}

Json report_to_json(const ConvergenceReport& rep) {
  Json steps = Json::array();
  Json timings = Json::array();
  for (const auto& s : rep.steps) {
    Json js;
    js["t_start"] = s.t_start;
    js["t_end"] = s.t_end;
    js["fbar"] = mat3_to_json(s.fbar);
    js["converged"] = s.converged;
    js["outer_iters"] = s.outer_iters;
    js["residuals"] = s.residuals;
    js["cg_iters"] = s.cg_iters;
    js["cg_breakdowns"] = s.cg_breakdowns;
    js["line_search_cuts"] = s.line_search_cuts;
    js["laminate"] = {{"failures", s.sweep.laminate_failures},
                      {"back_projections", s.sweep.back_projections},
                      {"iter_max", s.sweep.laminate_iter_max}};
    steps.push_back(js);
    timings.push_back(s.seconds);
  }
  Json j;
  j["steps"] = steps;
  j["success"] = rep.success;
  j["error"] = rep.error;
  j["bisections"] = rep.bisections;
  j["timings"] = {{"per_step_seconds", timings},
                  {"total_seconds", rep.seconds_total}};
  return j;
}

Json phase_averages_to_json(const PhaseAverages& pa) {
  Json j;
  j["pbar"] = mat3_to_json(pa.pbar);
  j["c_plus"] = pa.c_plus;
  if (pa.has_plus) j["pbar_plus"] = mat3_to_json(pa.pbar_plus);
  if (pa.has_minus) j["pbar_minus"] = mat3_to_json(pa.pbar_minus);
  return j;
}

void write_json(const Json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IOFailure("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
  if (!f) throw IOFailure("short write: " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IOFailure("cannot open for reading: " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw IOFailure("bad JSON in " + path.string() + ": " + e.what());
  }
}

void write_traction_csv(const std::vector<InterfaceSample>& samples,
                        const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IOFailure("cannot open for writing: " + path.string());
  f << "bi,bj,bk,cx,cy,cz,nx,ny,nz,Tx,Ty,Tz,Tnorm,tx,ty,tz,tnorm,area,"
       "area_spatial\n";
  f.precision(17);
  for (const auto& s : samples) {
    f << s.boxel[0] << ',' << s.boxel[1] << ',' << s.boxel[2] << ','
      << s.centroid[0] << ',' << s.centroid[1] << ',' << s.centroid[2] << ','
      << s.normal[0] << ',' << s.normal[1] << ',' << s.normal[2] << ','
      << s.traction[0] << ',' << s.traction[1] << ',' << s.traction[2] << ','
      << s.traction.norm() << ',' << s.traction_spatial[0] << ','
      << s.traction_spatial[1] << ',' << s.traction_spatial[2] << ','
      << s.traction_spatial.norm() << ',' << s.area << ',' << s.area_spatial
      << "\n";
  }
}

}  // namespace combo
