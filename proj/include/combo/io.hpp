// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "combo/combo_grid.hpp"
#include "combo/field.hpp"
#include "combo/postprocess.hpp"
#include "combo/solver.hpp"

namespace combo {

using Json = nlohmann::json;

// PhaseImage: JSON header {dims, lengths, dtype:"u8", order:"C, k fastest"}
// plus the raw little-endian byte array in a sibling .raw file.
void save_image(const PhaseImage& img, const std::filesystem::path& json_path);
PhaseImage load_image(const std::filesystem::path& json_path);

// ComboGrid: JSON header plus three raw arrays (kind u8, c_plus f64,
// normals f64 x3).
void save_grid(const ComboGrid& grid, const std::filesystem::path& json_path);
ComboGrid load_grid(const std::filesystem::path& json_path);

// Field dump: same header convention, f64 components, component-major.
void save_field(const Field9& f, const std::filesystem::path& json_path);
Field9 load_field(const std::filesystem::path& json_path);

/// Raw f64 plane of one component (axis/index) plus a JSON header.
void save_slice(const Field9& f, int comp, int axis, std::int64_t index,
                const std::filesystem::path& json_path);

Json mat3_to_json(const Mat3& m);
Mat3 mat3_from_json(const Json& j);

/// Solver report as JSON; wall-clock values are isolated in the "timings"
/// block so that reports are byte-identical across reruns otherwise.
Json report_to_json(const ConvergenceReport& rep);

Json phase_averages_to_json(const PhaseAverages& pa);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Traction table with a fixed column schema (documented in the header row).
void write_traction_csv(const std::vector<InterfaceSample>& samples,
                        const std::filesystem::path& path);

}  // namespace combo
