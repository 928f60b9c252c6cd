// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "combo/image.hpp"

namespace combo {

enum class BoxelKind : std::uint8_t {
  pure_matrix = 0,
  pure_inclusion = 1,
  composite = 2,
};

enum NormalFlag : std::uint8_t {
  normal_none = 0,
  normal_barycenter_ok = 1,
  normal_second_moment_ok = 2,
  normal_degenerate_fallback = 3,   // coinciding barycenters
  normal_too_few_interface = 4,     // fell back to the barycenter normal
};

/// Coarse boxel grid with exact per-boxel phase counts and (optionally)
/// interface normals for the composite boxels.
struct ComboGrid {
  std::array<std::int64_t, 3> dims{0, 0, 0};     // N1,N2,N3
  std::array<std::int64_t, 3> factors{1, 1, 1};  // fine voxels per boxel
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  std::vector<BoxelKind> kind;
  std::vector<double> c_plus;              // exact rational count/volume
  std::vector<std::int64_t> count_plus;    // integer inclusion count
  std::vector<Vec3> normal;                // unit, composite boxels only
  std::vector<std::uint8_t> normal_flag;

  std::int64_t boxel_count() const { return dims[0] * dims[1] * dims[2]; }
  std::int64_t fine_per_boxel() const {
    return factors[0] * factors[1] * factors[2];
  }
  std::size_t index(std::int64_t bi, std::int64_t bj, std::int64_t bk) const {
    return static_cast<std::size_t>((bi * dims[1] + bj) * dims[2] + bk);
  }
  double boxel_length(int axis) const {
    return lengths[static_cast<std::size_t>(axis)] /
           static_cast<double>(dims[static_cast<std::size_t>(axis)]);
  }

  std::int64_t composite_count() const;
  std::int64_t global_count_plus() const;
  /// Exact global inclusion fraction, computed from the integer counts.
  double global_c_plus() const;
};

/// Merge factors[i] fine voxels per axis into one boxel; factors must divide
/// the image dimensions (NonDividingFactor otherwise). Normals are left
/// unset.
ComboGrid coarsen(const PhaseImage& img, const std::array<std::int64_t, 3>& factors,
                  Exec exec = Exec::parallel);

}  // namespace combo
