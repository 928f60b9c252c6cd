#include <doctest.h>

#include <cmath>

#include "combo/combo_grid.hpp"
#include "combo/image.hpp"
#include "oracles.hpp"

using namespace combo;

TEST_CASE("sphere volume fraction approaches the analytic value") {
  const auto img = generate_sphere({128, 128, 128}, {1, 1, 1}, 0.4);
  const double analytic = 4.0 / 3.0 * 3.141592653589793 * 0.4 * 0.4 * 0.4;
  CHECK(std::abs(img.inclusion_fraction() - analytic) <= 1e-3 * analytic);
}

TEST_CASE("zero radius gives an all-matrix image") {
  const auto img = generate_sphere({16, 16, 16}, {1, 1, 1}, 0.0);
  CHECK(img.inclusion_count() == 0);
}

TEST_CASE("generators are deterministic") {
  const auto a =
      generate_fiber_pack({32, 32, 32}, {1, 1, 1}, 7, 12, 0.05, 0.6, 0.2);
  const auto b =
      generate_fiber_pack({32, 32, 32}, {1, 1, 1}, 7, 12, 0.05, 0.6, 0.2);
  CHECK(a.data == b.data);
  const auto c =
      generate_fiber_pack({32, 32, 32}, {1, 1, 1}, 8, 12, 0.05, 0.6, 0.2);
  CHECK(a.data != c.data);
}

TEST_CASE("serial and parallel generation agree bitwise") {
  const auto a = generate_sphere({48, 48, 48}, {1, 1, 1}, 0.3, Exec::parallel);
  const auto b = generate_sphere({48, 48, 48}, {1, 1, 1}, 0.3, Exec::serial);
  CHECK(a.data == b.data);
}

TEST_CASE("bad shape specs are rejected") {
  CHECK_THROWS_AS(generate_sphere({0, 4, 4}, {1, 1, 1}, 0.2), BadShapeSpec);
  CHECK_THROWS_AS(generate_sphere({4, 4, 4}, {1, 0, 1}, 0.2), BadShapeSpec);
  CHECK_THROWS_AS(generate_fiber({4, 4, 4}, {1, 1, 1}, 3, 0.2, 1.0),
                  BadShapeSpec);
  CHECK_THROWS_AS(generate_slab({4, 4, 4}, {1, 1, 1}, 0, 1.5), BadShapeSpec);
}

TEST_CASE("cross-ply default geometry hits the reported fiber fraction") {
  // layers=4, pitch=0.25, radius=0.1: pi r^2/(pitch*thickness) ~ 50.3%
  const auto img =
      generate_cross_ply({250, 250, 250}, {1, 1, 1}, 0.1, 0.25, 4);
  CHECK(img.inclusion_fraction() == doctest::Approx(0.5028).epsilon(0.01));
}

TEST_CASE("coarsen: all-matrix image, kinds and counts") {
  const auto img = generate_sphere({16, 16, 16}, {1, 1, 1}, 0.0);
  const auto g = coarsen(img, {4, 4, 4});
  CHECK(g.boxel_count() == 64);
  for (auto k : g.kind) CHECK(k == BoxelKind::pure_matrix);
  CHECK(g.global_count_plus() == 0);
}

TEST_CASE("coarsen rejects non-dividing factors") {
  const auto img = generate_sphere({16, 16, 16}, {1, 1, 1}, 0.3);
  CHECK_THROWS_AS(coarsen(img, {5, 4, 4}), NonDividingFactor);
  CHECK_THROWS_AS(coarsen(img, {0, 4, 4}), NonDividingFactor);
}

TEST_CASE("the 256^3 sphere coarsened by 8 has exactly 2624 composite boxels") {
  const auto img = generate_sphere({256, 256, 256}, {1, 1, 1}, 0.4);
  const auto g = coarsen(img, {8, 8, 8});
  CHECK(g.composite_count() == 2624);
  CHECK(g.global_count_plus() == img.inclusion_count());
}

TEST_CASE("volume fractions are preserved bit-exactly across factors") {
  const auto img =
      generate_fiber_pack({48, 48, 48}, {1, 1.3, 0.7}, 3, 20, 0.06, 0.5, 0.3);
  const std::int64_t fine = img.inclusion_count();
  for (const auto& f : {std::array<std::int64_t, 3>{2, 2, 2},
                        std::array<std::int64_t, 3>{4, 6, 8},
                        std::array<std::int64_t, 3>{48, 1, 3}}) {
    const auto g = coarsen(img, f);
    CHECK(g.global_count_plus() == fine);
    // double representation of the global ratio matches exactly
    CHECK(g.global_c_plus() ==
          static_cast<double>(fine) / static_cast<double>(img.size()));
    // per-boxel counts stay integers recoverable from c_plus
    for (std::size_t i = 0; i < g.c_plus.size(); ++i) {
      const double back = g.c_plus[i] * static_cast<double>(g.fine_per_boxel());
      CHECK(std::llround(back) == g.count_plus[i]);
    }
  }
}

TEST_CASE("coarsen is exec-independent") {
  const auto img = generate_octahedron({32, 32, 32}, {1, 1, 1}, 0.35);
  const auto a = coarsen(img, {4, 4, 4}, Exec::parallel);
  const auto b = coarsen(img, {4, 4, 4}, Exec::serial);
  CHECK(a.c_plus == b.c_plus);
  CHECK(a.count_plus == b.count_plus);
}

TEST_CASE("mirroring flips voxel order") {
  const auto img =
      generate_fiber_pack({12, 10, 8}, {1, 1, 1}, 5, 6, 0.1, 0.4, 0.5);
  const auto m = mirrored(img, 0);
  for (std::int64_t i = 0; i < 12; ++i)
    for (std::int64_t j = 0; j < 10; ++j)
      for (std::int64_t k = 0; k < 8; ++k)
        CHECK(m.at(11 - i, j, k) == img.at(i, j, k));
}

TEST_CASE("slab covers the requested fraction") {
  const auto img = generate_slab({64, 8, 8}, {1, 1, 1}, 0, 0.5);
  CHECK(img.inclusion_fraction() == doctest::Approx(0.5).epsilon(1e-12));
}
