// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "combo/parallel.hpp"
#include "combo/tensor.hpp"

namespace combo {

/// Regular periodic simulation grid of n1 x n2 x n3 cells.
struct SimGrid {
  std::array<std::int64_t, 3> dims{1, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  std::int64_t cells() const { return dims[0] * dims[1] * dims[2]; }
  double spacing(int axis) const {
    return lengths[static_cast<std::size_t>(axis)] /
           static_cast<double>(dims[static_cast<std::size_t>(axis)]);
  }
  std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>((i * dims[1] + j) * dims[2] + k);
  }
};

/// Nine scalar component arrays over the grid, component major; component
/// c = 3i+J holds F_iJ (row-major flattening as everywhere else).
struct Field9 {
  SimGrid grid;
  std::vector<double> data;

  Field9() = default;
  explicit Field9(const SimGrid& g)
      : grid(g),
        data(static_cast<std::size_t>(9 * g.cells()), 0.0) {}

  std::int64_t cells() const { return grid.cells(); }
  double* comp(int c) {
    return data.data() + static_cast<std::ptrdiff_t>(c) * cells();
  }
  const double* comp(int c) const {
    return data.data() + static_cast<std::ptrdiff_t>(c) * cells();
  }

  Mat3 cell(std::size_t idx) const {
    Mat3 m;
    const std::int64_t n = cells();
    for (int c = 0; c < 9; ++c)
      m(c / 3, c % 3) = data[static_cast<std::size_t>(c) *
                                 static_cast<std::size_t>(n) +
                             idx];
    return m;
  }
  void set_cell(std::size_t idx, const Mat3& m) {
    const std::int64_t n = cells();
    for (int c = 0; c < 9; ++c)
      data[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) + idx] =
          m(c / 3, c % 3);
  }

  void fill(const Mat3& m);
  /// Cell average, chunk-deterministic.
  Mat3 mean(Exec exec = Exec::parallel) const;
  /// Shifts every component so that mean() == m exactly.
  void pin_mean(const Mat3& m, Exec exec = Exec::parallel);
};

}  // namespace combo
