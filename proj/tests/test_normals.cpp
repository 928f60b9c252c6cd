#include <doctest.h>

#include <cmath>

#include "combo/normals.hpp"
#include "oracles.hpp"

using namespace combo;

namespace {

/// 3x3-padded plane image: the analytic half space {(x-c).n0 < off} on a
/// (3*bx) x (3*by) x 1 grid of unit voxels, matching padding around the
/// center boxel.
PhaseImage plane_image(std::int64_t bx, std::int64_t by, const Vec3& n0,
                       double off) {
  const std::array<std::int64_t, 3> dims{3 * bx, 3 * by, 1};
  const std::array<double, 3> lengths{static_cast<double>(3 * bx),
                                      static_cast<double>(3 * by), 1.0};
  const Vec3 c(0.5 * lengths[0], 0.5 * lengths[1], 0.5);
  return generate_from_predicate(dims, lengths, [&](const Vec3& x) {
    return (x - c).dot(n0) - off < 0.0;
  });
}

}  // namespace

TEST_CASE("laplace weights vanish on uniform images") {
  PhaseImage img;
  img.dims = {8, 8, 8};
  img.lengths = {1, 1, 1};
  img.data.assign(512, 1);
  const auto w = laplace_weights(img);
  for (double v : w.w) CHECK(v == 0.0);
}

TEST_CASE("laplace weights: 1D periodic step, hand evaluation") {
  // two-phase step along x, h = 1 everywhere: the voxels flanking each
  // interface carry |w| = r1, everything else 0
  PhaseImage img;
  img.dims = {8, 1, 1};
  img.lengths = {8, 1, 1};
  img.data = {1, 1, 1, 1, 0, 0, 0, 0};
  const auto w = laplace_weights(img);
  const double r1 = 1.0;  // h2*h3/h1 with h=(1,1,1)
  for (std::int64_t i = 0; i < 8; ++i) {
    const bool flank = i == 3 || i == 4 || i == 7 || i == 0;
    CHECK(w.w[static_cast<std::size_t>(i)] ==
          doctest::Approx(flank ? r1 : 0.0).epsilon(1e-15));
  }
}

TEST_CASE("direct and Fourier convolutions agree") {
  const auto img =
      generate_fiber_pack({24, 20, 16}, {1.0, 0.8, 1.2}, 9, 10, 0.1, 0.5, 0.4);
  const auto wd = laplace_weights(img, ConvMethod::direct);
  const auto wf = laplace_weights(img, ConvMethod::fft);
  double scale = 0.0;
  for (double v : wd.w) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < wd.w.size(); ++i)
    CHECK(std::abs(wd.w[i] - wf.w[i]) <= 1e-10 * scale);
}

TEST_CASE("axis-aligned plane: both methods return the exact axis") {
  // slab wall normal to e1 bisecting equiaxed boxels
  const auto img = generate_slab({32, 32, 32}, {1, 1, 1}, 0, 0.4375);
  auto grid = coarsen(img, {8, 8, 8});
  compute_normals(img, grid, NormalMethod::barycenter);
  ComboGrid grid2 = grid;
  compute_normals(img, grid2, NormalMethod::second_moment);
  std::int64_t seen = 0;
  for (std::int64_t ib = 0; ib < grid.boxel_count(); ++ib) {
    const auto s = static_cast<std::size_t>(ib);
    if (grid.kind[s] != BoxelKind::composite) continue;
    ++seen;
    CHECK(std::abs(grid.normal[s][0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(grid2.normal[s][0]) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(seen > 0);
}

TEST_CASE("the 16x6 boxel of the plane benchmark") {
  // plane at 12 degrees from the long axis, offset -0.75 voxels
  const double theta = 12.0 * 3.141592653589793 / 180.0;
  const Vec3 n0(std::sin(theta), std::cos(theta), 0.0);
  const auto img = plane_image(16, 6, n0, -0.75);
  auto grid = coarsen(img, {16, 6, 1});
  REQUIRE(grid.kind[grid.index(1, 1, 0)] == BoxelKind::composite);

  compute_normals(img, grid, NormalMethod::barycenter);
  const double col_bary = grid.normal[grid.index(1, 1, 0)].dot(n0);
  CHECK(col_bary == doctest::Approx(0.776).epsilon(0.013));

  compute_normals(img, grid, NormalMethod::second_moment);
  const double col_sm = grid.normal[grid.index(1, 1, 0)].dot(n0);
  CHECK(col_sm >= 0.999);
  CHECK(col_sm > col_bary);
}

TEST_CASE("checkerboard boxel degenerates to the flagged fallback") {
  PhaseImage img;
  img.dims = {4, 4, 1};
  img.lengths = {4, 4, 1};
  img.data.assign(16, 0);
  for (std::int64_t i = 0; i < 4; ++i)
    for (std::int64_t j = 0; j < 4; ++j)
      img.data[img.index(i, j, 0)] = static_cast<std::uint8_t>((i + j) % 2);
  auto grid = coarsen(img, {4, 4, 1});
  REQUIRE(grid.kind[0] == BoxelKind::composite);
  const NormalStats st = compute_normals(img, grid, NormalMethod::barycenter);
  CHECK(st.degenerate_fallbacks == 1);
  CHECK(grid.normal_flag[0] == normal_degenerate_fallback);
  CHECK(grid.normal[0].norm() == doctest::Approx(1.0));
}

TEST_CASE("too few interface voxels falls back to the barycenter normal") {
  // a single inclusion voxel in a boxel: only 1 weighted voxel inside it
  PhaseImage img;
  img.dims = {8, 8, 1};
  img.lengths = {8, 8, 1};
  img.data.assign(64, 0);
  img.data[img.index(1, 1, 0)] = 1;
  auto grid = coarsen(img, {4, 4, 1});
  NormalOptions opt;
  opt.min_interface_voxels = 6;
  const NormalStats st =
      compute_normals(img, grid, NormalMethod::second_moment, opt);
  CHECK(st.too_few_fallbacks >= 1);
  CHECK(grid.normal_flag[0] == normal_too_few_interface);
}

TEST_CASE("mirror symmetry of both normal methods") {
  const auto img =
      generate_fiber_pack({24, 24, 24}, {1, 1, 1}, 13, 8, 0.12, 0.6, 0.3);
  const auto mimg = mirrored(img, 1);
  for (auto method : {NormalMethod::barycenter, NormalMethod::second_moment}) {
    auto g0 = coarsen(img, {6, 6, 6});
    auto g1 = coarsen(mimg, {6, 6, 6});
    compute_normals(img, g0, method);
    compute_normals(mimg, g1, method);
    for (std::int64_t bi = 0; bi < 4; ++bi)
      for (std::int64_t bj = 0; bj < 4; ++bj)
        for (std::int64_t bk = 0; bk < 4; ++bk) {
          const auto s0 = g0.index(bi, bj, bk);
          const auto s1 = g1.index(bi, 3 - bj, bk);
          if (g0.kind[s0] != BoxelKind::composite) continue;
          REQUIRE(g1.kind[s1] == BoxelKind::composite);
          if (g0.normal_flag[s0] != normal_barycenter_ok &&
              g0.normal_flag[s0] != normal_second_moment_ok)
            continue;
          Vec3 expect = g0.normal[s0];
          expect[1] = -expect[1];
          CHECK((g1.normal[s1] - expect).norm() <= 1e-10);
        }
  }
}

TEST_CASE("box cut fraction and facet placement") {
  const Vec3 lo(0, 0, 0), hi(1, 1, 1);
  SUBCASE("half space through the middle") {
    CHECK(box_cut_fraction(lo, hi, Vec3::UnitX(), 0.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(box_cut_fraction(lo, hi, Vec3::UnitX(), -0.1) == 0.0);
    CHECK(box_cut_fraction(lo, hi, Vec3::UnitX(), 1.1) == 1.0);
  }
  SUBCASE("oblique corner cut") {
    // tetrahedron corner with side s has volume s^3/6
    const Vec3 n = Vec3(1, 1, 1).normalized();
    const double s = 0.4;
    const double d = s / std::sqrt(3.0);
    CHECK(box_cut_fraction(lo, hi, n, d) ==
          doctest::Approx(s * s * s / 6.0).epsilon(1e-10));
  }
}

TEST_CASE("facets recover c_plus for random planes") {
  oracle::Rng rng(61);
  // single-boxel grids with prescribed c_plus and normal
  for (int rep = 0; rep < 25; ++rep) {
    ComboGrid g;
    g.dims = {1, 1, 1};
    g.factors = {4, 4, 4};
    g.lengths = {1.0, 0.8, 1.3};
    g.kind = {BoxelKind::composite};
    g.c_plus = {0.05 + 0.9 * rng.unit()};
    g.count_plus = {0};
    g.normal = {rng.unit_vec3()};
    g.normal_flag = {normal_second_moment_ok};
    const auto facets = facet_export(g);
    REQUIRE(facets.size() == 1);
    const double frac = box_cut_fraction(Vec3::Zero(), Vec3(1.0, 0.8, 1.3),
                                         facets[0].normal,
                                         facets[0].plane_offset);
    CHECK(std::abs(frac - g.c_plus[0]) <= 1e-8);
    CHECK(facets[0].area > 0.0);
  }
  // mid-plane facet for c_plus = 1/2 and an axis normal
  ComboGrid g;
  g.dims = {1, 1, 1};
  g.factors = {2, 2, 2};
  g.lengths = {1, 1, 1};
  g.kind = {BoxelKind::composite};
  g.c_plus = {0.5};
  g.count_plus = {4};
  g.normal = {Vec3::UnitX()};
  g.normal_flag = {normal_second_moment_ok};
  const auto facets = facet_export(g);
  REQUIRE(facets.size() == 1);
  CHECK(facets[0].plane_offset == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(facets[0].area == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("second-moment facets close the sphere surface better") {
  const auto img = generate_sphere({64, 64, 64}, {1, 1, 1}, 0.4);
  auto g_bary = coarsen(img, {8, 8, 8});
  auto g_sm = coarsen(img, {8, 8, 8});
  compute_normals(img, g_bary, NormalMethod::barycenter);
  compute_normals(img, g_sm, NormalMethod::second_moment);
  const double gap_bary = facet_gap_metric(g_bary, facet_export(g_bary));
  const double gap_sm = facet_gap_metric(g_sm, facet_export(g_sm));
  CHECK(gap_sm < gap_bary);
}

TEST_CASE("sphere normals: second moment beats barycenter on colinearity") {
  const auto img = generate_sphere({64, 64, 64}, {1, 1, 1}, 0.4);
  auto g_bary = coarsen(img, {8, 8, 8});
  auto g_sm = coarsen(img, {8, 8, 8});
  compute_normals(img, g_bary, NormalMethod::barycenter);
  compute_normals(img, g_sm, NormalMethod::second_moment);
  const auto w = laplace_weights(img);
  const auto anchors = interface_centroids(img, g_bary, w);
  const Vec3 center(0.5, 0.5, 0.5);
  auto radial = [&](const Vec3& x) { return Vec3((x - center).normalized()); };
  const auto cb = colinearity_stats(g_bary, anchors, radial);
  const auto cs = colinearity_stats(g_sm, anchors, radial);
  CHECK(cs.count == cb.count);
  CHECK(cs.mean > cb.mean);
  CHECK(cs.mean >= 0.99);
}

TEST_CASE("sphere 256^3 -> 32^3: mean radial colinearity meets the frozen bar") {
  const auto img = generate_sphere({256, 256, 256}, {1, 1, 1}, 0.4);
  auto g_sm = coarsen(img, {8, 8, 8});
  auto g_ba = coarsen(img, {8, 8, 8});
  compute_normals(img, g_sm, NormalMethod::second_moment);
  compute_normals(img, g_ba, NormalMethod::barycenter);
  const auto w = laplace_weights(img);
  const auto anchors = interface_centroids(img, g_sm, w);
  const Vec3 center(0.5, 0.5, 0.5);
  auto radial = [&](const Vec3& x) { return Vec3((x - center).normalized()); };
  const auto cs = colinearity_stats(g_sm, anchors, radial);
  const auto cb = colinearity_stats(g_ba, anchors, radial);
  CHECK(cs.count == 2624);
  CHECK(cs.mean >= 0.995);
  CHECK(cs.mean > cb.mean);
}
