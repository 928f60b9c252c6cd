// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "combo/parallel.hpp"
#include "combo/tensor.hpp"

namespace combo {

/// Fine-scale binary voxel image. Storage is C order with the last index
/// fastest; phase 1 is the inclusion ("+"), phase 0 the matrix ("-").
struct PhaseImage {
  std::array<std::int64_t, 3> dims{0, 0, 0};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  std::vector<std::uint8_t> data;

  std::int64_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>((i * dims[1] + j) * dims[2] + k);
  }
  std::uint8_t at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return data[index(i, j, k)];
  }
  double spacing(int axis) const {
    return lengths[static_cast<std::size_t>(axis)] /
           static_cast<double>(dims[static_cast<std::size_t>(axis)]);
  }
  Vec3 voxel_center(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return Vec3((static_cast<double>(i) + 0.5) * spacing(0),
                (static_cast<double>(j) + 0.5) * spacing(1),
                (static_cast<double>(k) + 0.5) * spacing(2));
  }
  std::int64_t inclusion_count(Exec exec = Exec::parallel) const;
  double inclusion_fraction() const {
    return static_cast<double>(inclusion_count()) /
           static_cast<double>(size());
  }
};

/// Fills an image from an indicator evaluated at voxel centers.
PhaseImage generate_from_predicate(
    const std::array<std::int64_t, 3>& dims,
    const std::array<double, 3>& lengths,
    const std::function<bool(const Vec3&)>& inside,
    Exec exec = Exec::parallel);

/// Centered sphere of radius r (absolute units), periodic wrap.
PhaseImage generate_sphere(const std::array<std::int64_t, 3>& dims,
                           const std::array<double, 3>& lengths, double radius,
                           Exec exec = Exec::parallel);

/// Centered regular octahedron |x-c|_1 <= r.
PhaseImage generate_octahedron(const std::array<std::int64_t, 3>& dims,
                               const std::array<double, 3>& lengths,
                               double radius, Exec exec = Exec::parallel);

/// Single centered cylinder along a coordinate axis; length >= axis length
/// makes it span periodically.
PhaseImage generate_fiber(const std::array<std::int64_t, 3>& dims,
                          const std::array<double, 3>& lengths, int axis,
                          double radius, double length,
                          Exec exec = Exec::parallel);

/// Cross-ply laminate: plies stacked along x, fibers alternating along y and
/// z, one row of fibers per ply at the given pitch.
PhaseImage generate_cross_ply(const std::array<std::int64_t, 3>& dims,
                              const std::array<double, 3>& lengths,
                              double radius, double pitch, int layers,
                              Exec exec = Exec::parallel);

/// Random capsule pack with a preferred x direction. Deterministic in the
/// seed; overlaps are allowed.
PhaseImage generate_fiber_pack(const std::array<std::int64_t, 3>& dims,
                               const std::array<double, 3>& lengths,
                               std::uint64_t seed, int count, double radius,
                               double length, double orientation_spread,
                               Exec exec = Exec::parallel);

/// Axis-aligned centered slab covering the given thickness fraction.
PhaseImage generate_slab(const std::array<std::int64_t, 3>& dims,
                         const std::array<double, 3>& lengths, int axis,
                         double fraction, Exec exec = Exec::parallel);

/// Mirror the image along one axis (voxel order reversal).
PhaseImage mirrored(const PhaseImage& img, int axis);

}  // namespace combo
