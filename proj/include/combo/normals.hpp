// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "combo/combo_grid.hpp"

namespace combo {

/// Interface indicator |S * chi| on the fine grid; S is the 7-point stencil
/// composed of uniaxial second differences weighted by r_i = h_j h_k / h_i
/// (face area over edge length of the fine voxel), periodic wrap.
struct WeightField {
  std::array<std::int64_t, 3> dims{0, 0, 0};
  std::vector<double> w;

  std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>((i * dims[1] + j) * dims[2] + k);
  }
};

enum class ConvMethod { direct, fft };

WeightField laplace_weights(const PhaseImage& img,
                            ConvMethod method = ConvMethod::direct,
                            Exec exec = Exec::parallel);

enum class NormalMethod { barycenter, second_moment };
enum class SecondMomentCentering { weighted_centroid, boxel_center };

struct NormalOptions {
  SecondMomentCentering centering = SecondMomentCentering::weighted_centroid;
  int min_interface_voxels = 3;
  ConvMethod conv = ConvMethod::direct;
};

struct NormalStats {
  std::int64_t composite = 0;
  std::int64_t degenerate_fallbacks = 0;  // coinciding phase barycenters
  std::int64_t too_few_fallbacks = 0;     // second moment lacked support
};

/// Per-boxel barycenter normal (c- barycenter minus c+ barycenter,
/// normalized); degenerate flags coinciding barycenters, in which case the
/// axis of the largest inclusion extent is substituted.
struct BarycenterNormal {
  Vec3 n = Vec3::Zero();
  bool degenerate = false;
};

BarycenterNormal boxel_barycenter_normal(const PhaseImage& img,
                                         const ComboGrid& grid,
                                         std::int64_t bi, std::int64_t bj,
                                         std::int64_t bk);

/// Assigns interface normals to every composite boxel of the grid.
NormalStats compute_normals(const PhaseImage& img, ComboGrid& grid,
                            NormalMethod method, const NormalOptions& opt = {},
                            Exec exec = Exec::parallel);

/// Weighted interface centroid per composite boxel (flat boxel index);
/// zero vector where the boxel has no weighted voxels.
std::vector<Vec3> interface_centroids(const PhaseImage& img,
                                      const ComboGrid& grid,
                                      const WeightField& w);

// ---------------------------------------------------------------------------
// facet reconstruction

struct Facet {
  std::array<std::int64_t, 3> boxel{0, 0, 0};
  Vec3 normal = Vec3::Zero();
  double plane_offset = 0.0;  // plane is {x . normal = plane_offset}
  std::vector<Vec3> polygon;  // ordered vertices, absolute coordinates
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
};

/// Planar facet per composite boxel: the cut plane orthogonal to the stored
/// normal placed so that the inclusion-side volume fraction matches c_plus
/// (bisection to 1e-10).
std::vector<Facet> facet_export(const ComboGrid& grid);

/// Mean distance between the boundary segments of facets in face-adjacent
/// composite boxels; the declared gap/overlap statistic (smaller is better).
double facet_gap_metric(const ComboGrid& grid, const std::vector<Facet>& facets);

struct Colinearity {
  double mean = 0.0;
  double min = 0.0;
  std::int64_t count = 0;
};

/// N . N0 statistics over composite boxels; the analytic normal is evaluated
/// at the given anchor point of each boxel (flat boxel index).
Colinearity colinearity_stats(
    const ComboGrid& grid, const std::vector<Vec3>& anchors,
    const std::function<Vec3(const Vec3&)>& analytic_normal);

/// Volume fraction of the box [lo,hi] on the inclusion side {x.n <= d}.
double box_cut_fraction(const Vec3& lo, const Vec3& hi, const Vec3& n,
                        double d);

}  // namespace combo
