// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/config.hpp"

#include <set>
#include <map>

namespace combo {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object())
    throw ConfigInvalid("config: " + where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw ConfigInvalid("config: unknown key \"" + key + "\" in " + where);
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

GreenKind parse_green(const std::string& s) {
  if (s == "continuous") return GreenKind::continuous;
  if (s == "rotated") return GreenKind::rotated;
  if (s == "staggered") return GreenKind::staggered;
  throw ConfigInvalid("config: unknown green operator \"" + s + "\"");
}

std::string green_name(GreenKind g) {
  switch (g) {
    case GreenKind::continuous: return "continuous";
    case GreenKind::rotated: return "rotated";
    case GreenKind::staggered: return "staggered";
  }
  return "?";
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  reject_unknown(j, {"geometry", "dims", "lengths", "coarsen", "normals",
                     "materials", "loading", "solver", "laminate", "output",
                     "seed", "threads"},
                 "top level");
  RunConfig c;

  if (j.contains("geometry") && !j.at("geometry").empty()) {
    const Json& g = j.at("geometry");
    if (g.contains("image")) {
      reject_unknown(g, {"image"}, "geometry");
    } else {
      if (!g.contains("shape"))
        throw ConfigInvalid("config: geometry needs \"shape\" or \"image\"");
      const std::string shape = g.at("shape").get<std::string>();
      static const std::map<std::string, std::set<std::string>> shapes = {
          {"sphere", {"shape", "radius"}},
          {"octahedron", {"shape", "radius"}},
          {"fiber", {"shape", "axis", "radius", "length"}},
          {"cross_ply", {"shape", "radius", "pitch", "layers"}},
          {"fiber_pack",
           {"shape", "count", "radius", "length", "orientation_spread"}},
          {"slab", {"shape", "axis", "fraction"}},
      };
      const auto it = shapes.find(shape);
      if (it == shapes.end())
        throw BadShapeSpec("config: unknown shape \"" + shape + "\"");
      reject_unknown(g, it->second, "geometry");
    }
    c.geometry = g;
  }

  c.dims = get_or(j, "dims", c.dims);
  c.lengths = get_or(j, "lengths", c.lengths);
  c.coarsen_factors = get_or(j, "coarsen", c.coarsen_factors);

  if (j.contains("normals")) {
    const Json& n = j.at("normals");
    reject_unknown(n, {"method", "centering", "min_interface_voxels", "conv"},
                   "normals");
    const std::string m = get_or<std::string>(n, "method", "second_moment");
    if (m == "barycenter")
      c.normal_method = NormalMethod::barycenter;
    else if (m == "second_moment")
      c.normal_method = NormalMethod::second_moment;
    else
      throw ConfigInvalid("config: unknown normal method \"" + m + "\"");
    const std::string cen =
        get_or<std::string>(n, "centering", "weighted_centroid");
    if (cen == "weighted_centroid")
      c.normal_options.centering = SecondMomentCentering::weighted_centroid;
    else if (cen == "boxel_center")
      c.normal_options.centering = SecondMomentCentering::boxel_center;
    else
      throw ConfigInvalid("config: unknown centering \"" + cen + "\"");
    c.normal_options.min_interface_voxels =
        get_or(n, "min_interface_voxels", 3);
    const std::string conv = get_or<std::string>(n, "conv", "direct");
    if (conv == "direct")
      c.normal_options.conv = ConvMethod::direct;
    else if (conv == "fft")
      c.normal_options.conv = ConvMethod::fft;
    else
      throw ConfigInvalid("config: unknown conv \"" + conv + "\"");
  }

  if (j.contains("materials")) {
    reject_unknown(j.at("materials"), {"matrix", "inclusion"}, "materials");
    c.materials = j.at("materials");
  }

  if (j.contains("loading")) {
    c.loading = mat3_from_json(j.at("loading"));
    if (!(c.loading.determinant() > 0.0))
      throw ConfigInvalid("config: loading must have positive determinant");
  } else {
    c.loading = Mat3::Identity();
    c.loading(0, 1) = 0.5;  // 50% shear default
  }

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    reject_unknown(s,
                   {"scheme", "green", "material_eval", "tol_equilibrium",
                    "max_outer", "cg_tol", "cg_max", "load_steps", "combo",
                    "max_bisections", "verbose"},
                   "solver");
    const std::string scheme = get_or<std::string>(s, "scheme", "newton_cg");
    if (scheme == "basic")
      c.solver.scheme = Scheme::basic;
    else if (scheme == "newton_cg")
      c.solver.scheme = Scheme::newton_cg;
    else
      throw ConfigInvalid("config: unknown scheme \"" + scheme + "\"");
    c.solver.green = parse_green(get_or<std::string>(s, "green", "rotated"));
    const std::string ev = get_or<std::string>(s, "material_eval", "per_cell");
    if (ev == "per_cell")
      c.solver.eval = MaterialEval::per_cell;
    else if (ev == "dfmg")
      c.solver.eval = MaterialEval::dfmg;
    else
      throw ConfigInvalid("config: unknown material_eval \"" + ev + "\"");
    c.solver.tol_equilibrium = get_or(s, "tol_equilibrium", 1e-8);
    c.solver.max_outer = get_or(s, "max_outer", 200);
    c.solver.cg_tol = get_or(s, "cg_tol", 1e-2);
    c.solver.cg_max = get_or(s, "cg_max", 2000);
    c.solver.load_steps = get_or(s, "load_steps", 1);
    c.solver.max_bisections = get_or(s, "max_bisections", 5);
    c.solver.verbose = get_or(s, "verbose", false);
    c.combo = get_or(s, "combo", true);
  }

  if (j.contains("laminate")) {
    const Json& l = j.at("laminate");
    reject_unknown(l, {"tol_rel", "tol_abs", "max_iter", "back_projection",
                       "c_min"},
                   "laminate");
    c.laminate.tol_rel = get_or(l, "tol_rel", 1e-10);
    c.laminate.tol_abs = get_or(l, "tol_abs", 0.0);
    c.laminate.max_iter = get_or(l, "max_iter", 50);
    c.laminate.back_projection = get_or(l, "back_projection", true);
    c.laminate.c_min = get_or(l, "c_min", 0.0);
  }

  if (j.contains("output")) {
    const Json& o = j.at("output");
    reject_unknown(o, {"dir", "dump_fields", "slices"}, "output");
    c.out_dir = get_or<std::string>(o, "dir", "out");
    c.dump_fields = get_or(o, "dump_fields", false);
    c.slices = o.contains("slices") ? o.at("slices") : Json::array();
  }

  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.threads = get_or(j, "threads", 0);
  c.solver.threads = c.threads;
  c.solver.validate();
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["geometry"] = geometry.is_null() ? Json::object() : geometry;
  j["dims"] = dims;
  j["lengths"] = lengths;
  j["coarsen"] = coarsen_factors;
  j["normals"] = {
      {"method",
       normal_method == NormalMethod::barycenter ? "barycenter"
                                                 : "second_moment"},
      {"centering",
       normal_options.centering == SecondMomentCentering::weighted_centroid
           ? "weighted_centroid"
           : "boxel_center"},
      {"min_interface_voxels", normal_options.min_interface_voxels},
      {"conv", normal_options.conv == ConvMethod::direct ? "direct" : "fft"}};
  j["materials"] = materials.is_null() ? Json::object() : materials;
  j["loading"] = mat3_to_json(loading);
  j["solver"] = {
      {"scheme", solver.scheme == Scheme::basic ? "basic" : "newton_cg"},
      {"green", green_name(solver.green)},
      {"material_eval",
       solver.eval == MaterialEval::per_cell ? "per_cell" : "dfmg"},
      {"tol_equilibrium", solver.tol_equilibrium},
      {"max_outer", solver.max_outer},
      {"cg_tol", solver.cg_tol},
      {"cg_max", solver.cg_max},
      {"load_steps", solver.load_steps},
      {"max_bisections", solver.max_bisections},
      {"combo", combo},
      {"verbose", solver.verbose}};
  j["laminate"] = {{"tol_rel", laminate.tol_rel},
                   {"tol_abs", laminate.tol_abs},
                   {"max_iter", laminate.max_iter},
                   {"back_projection", laminate.back_projection},
                   {"c_min", laminate.c_min}};
  j["output"] = {{"dir", out_dir},
                 {"dump_fields", dump_fields},
                 {"slices", slices}};
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

MaterialPtr make_material(const Json& spec) {
  const std::string model = spec.at("model").get<std::string>();
  if (model == "neo_hookean") {
    reject_unknown(spec, {"model", "E", "nu"}, "material");
    return std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(
        spec.at("E").get<double>(), spec.at("nu").get<double>()));
  }
  if (model == "linear") {
    reject_unknown(spec, {"model", "E", "nu"}, "material");
    return std::make_shared<LinearElasticLaw>(LinearElasticParams::from_enu(
        spec.at("E").get<double>(), spec.at("nu").get<double>()));
  }
  if (model == "thermal")
    throw ConfigInvalid(
        "material: thermal conductivities parameterize the laminate ops, not "
        "the mechanical solver");
  throw ConfigInvalid("material: unknown model \"" + model + "\"");
}

PhaseImage generate_shape(const Json& g,
                          const std::array<std::int64_t, 3>& dims,
                          const std::array<double, 3>& lengths,
                          std::uint64_t seed, Exec exec) {
  const std::string shape = g.at("shape").get<std::string>();
  if (shape == "sphere")
    return generate_sphere(dims, lengths, g.at("radius").get<double>(), exec);
  if (shape == "octahedron")
    return generate_octahedron(dims, lengths, g.at("radius").get<double>(),
                               exec);
  if (shape == "fiber")
    return generate_fiber(dims, lengths, g.at("axis").get<int>(),
                          g.at("radius").get<double>(),
                          g.at("length").get<double>(), exec);
  if (shape == "cross_ply")
    return generate_cross_ply(dims, lengths, g.at("radius").get<double>(),
                              g.at("pitch").get<double>(),
                              g.at("layers").get<int>(), exec);
  if (shape == "fiber_pack")
    return generate_fiber_pack(
        dims, lengths, seed, g.at("count").get<int>(),
        g.at("radius").get<double>(), g.at("length").get<double>(),
        g.at("orientation_spread").get<double>(), exec);
  if (shape == "slab")
    return generate_slab(dims, lengths, g.at("axis").get<int>(),
                         g.at("fraction").get<double>(), exec);
  throw BadShapeSpec("generate: unknown shape \"" + shape + "\"");
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigInvalid("override must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  Json* node = &config;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty()) throw ConfigInvalid("override: empty key in path");
    if (dot == std::string::npos) {
      Json parsed;
      try {
        parsed = Json::parse(value);
      } catch (const Json::parse_error&) {
        parsed = value;  // plain string
      }
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

}  // namespace combo
