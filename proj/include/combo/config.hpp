// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "combo/io.hpp"
#include "combo/normals.hpp"
#include "combo/solver.hpp"

namespace combo {

/// Parsed and validated run configuration; unknown keys are rejected, the
/// effective (defaults-filled) form is echoed next to the outputs.
struct RunConfig {
  // geometry: either an analytic shape or an image file reference
  Json geometry;  // validated shape subobject, or {"image": path}
  std::array<std::int64_t, 3> dims{64, 64, 64};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  std::array<std::int64_t, 3> coarsen_factors{4, 4, 4};

  NormalMethod normal_method = NormalMethod::second_moment;
  NormalOptions normal_options;

  Json materials;  // {"matrix": {...}, "inclusion": {...}}

  Mat3 loading = Mat3::Identity();
  bool combo = true;
  SolverConfig solver;
  LaminateOptions laminate;

  std::string out_dir = "out";
  bool dump_fields = false;
  Json slices = Json::array();

  std::uint64_t seed = 0;
  int threads = 0;

  static RunConfig from_json(const Json& j);
  Json to_json() const;  // effective config, re-runnable
};

/// Builds the material laws from the config table. Thermal entries are valid
/// config but cannot drive the mechanical solver.
MaterialPtr make_material(const Json& spec);

/// Generates the configured analytic shape.
PhaseImage generate_shape(const Json& geometry,
                          const std::array<std::int64_t, 3>& dims,
                          const std::array<double, 3>& lengths,
                          std::uint64_t seed, Exec exec = Exec::parallel);

/// Applies --override key.path=value (value parsed as JSON when possible).
void apply_override(Json& config, const std::string& assignment);

}  // namespace combo
