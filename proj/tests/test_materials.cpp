#include <doctest.h>

#include "combo/materials.hpp"
#include "oracles.hpp"

using namespace combo;

TEST_CASE("Lame parameters from E, nu") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  CHECK(p.lambda == doctest::Approx(5.769230769230769).epsilon(1e-14));
  CHECK(p.mu == doctest::Approx(3.846153846153846).epsilon(1e-14));
  CHECK_THROWS(NeoHookeanParams::from_enu(-1.0, 0.3));
  CHECK_THROWS(NeoHookeanParams::from_enu(1.0, 0.5));
}

TEST_CASE("stress-free reference state") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  const auto r = neo_hookean(Mat3::Identity(), p);
  REQUIRE(r.has_value());
  CHECK(r->energy == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r->pk2.norm() <= 1e-15);
}

TEST_CASE("inadmissible deformation is a value, not a crash") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  Mat3 f = Mat3::Identity();
  f(0, 0) = -1.0;
  CHECK(!neo_hookean(f, p).has_value());
}

TEST_CASE("pk2 stiffness matches finite differences of S(E)") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  oracle::Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat3 f = rng.admissible_f();
    const auto r = neo_hookean(f, p);
    REQUIRE(r.has_value());
    // columns of dS/dE in Mandel space via central differences on E
    const Mat3 c = f.transpose() * f;
    const Mat3 e0 = 0.5 * (c - Mat3::Identity());
    const double h = 1e-6;
    Mat6 fd;
    for (int col = 0; col < 6; ++col) {
      Vec6 de = Vec6::Zero();
      de[col] = h;
      auto s_of_e = [&](const Vec6& ev) {
        const Mat3 e = from_mandel(ev);
        const Mat3 cc = 2.0 * e + Mat3::Identity();
        // rebuild an F with this C via its square root (spectral)
        Eigen::SelfAdjointEigenSolver<Mat3> es(cc);
        const Mat3 fr = es.operatorSqrt();
        const auto rr = neo_hookean(fr, p);
        REQUIRE(rr.has_value());
        return to_mandel(rr->pk2);
      };
      fd.col(col) =
          (s_of_e(to_mandel(e0) + de) - s_of_e(to_mandel(e0) - de)) /
          (2.0 * h);
    }
    CHECK((fd - r->stiffness).norm() <= 1e-6 * r->stiffness.norm());
  }
}

TEST_CASE("pk2_to_pk1 is the plain product") {
  oracle::Rng rng(22);
  const Mat3 s0 = rng.sym3();
  CHECK((pk2_to_pk1(Mat3::Identity(), s0) - s0).norm() == 0.0);
  CHECK(pk2_to_pk1(rng.mat3(), Mat3::Zero()).norm() == 0.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat3 f = rng.mat3();
    const Mat3 s = rng.sym3();
    CHECK((pk2_to_pk1(f, s) - f * s).norm() == 0.0);
  }
}

TEST_CASE("tangent_pk1 at F = I embeds the Mandel stiffness") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  const auto r = neo_hookean(Mat3::Identity(), p);
  REQUIRE(r.has_value());
  const Mat9 a = tangent_pk1(Mat3::Identity(), r->pk2, r->stiffness);
  CHECK((a - mandel_to_mat9(r->stiffness)).norm() <= 1e-12 * a.norm());
  // and equals the isotropic 9x9 elasticity with lambda, mu
  const Mat9 iso =
      mandel_to_mat9(LinearElasticParams::isotropic(p.lambda, p.mu).stiffness);
  CHECK((a - iso).norm() <= 1e-12 * a.norm());
}

TEST_CASE("tangent_pk1 matches finite differences of P(F)") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  NeoHookeanLaw law(p);
  oracle::Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat3 f = rng.admissible_f();
    Mat3 pk1;
    Mat9 a;
    REQUIRE(law.eval_tangent(f, pk1, a));
    const double h = 1e-6 * std::max(1.0, f.norm());
    const Mat9 fd = oracle::fd_tangent(
        [&](const Mat3& ff) {
          Mat3 out;
          REQUIRE(law.eval(ff, out));
          return out;
        },
        f, h);
    CHECK((fd - a).norm() <= 1e-6 * a.norm());
    CHECK((a - a.transpose()).norm() <= 1e-10 * a.norm());
  }
}

TEST_CASE("hyperelastic consistency: dW/dF equals P") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  oracle::Rng rng(24);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat3 f = rng.admissible_f();
    const auto r = neo_hookean(f, p);
    REQUIRE(r.has_value());
    const Mat3 pk1 = pk2_to_pk1(f, r->pk2);
    const double h = 1e-6 * std::max(1.0, f.norm());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Mat3 fp = f, fm = f;
        fp(i, j) += h;
        fm(i, j) -= h;
        const double dw = (neo_hookean(fp, p)->energy -
                           neo_hookean(fm, p)->energy) /
                          (2.0 * h);
        CHECK(dw == doctest::Approx(pk1(i, j))
                        .epsilon(1e-5)
                        .scale(std::max(1.0, pk1.norm())));
      }
  }
}

TEST_CASE("frame indifference") {
  const auto p = NeoHookeanParams::from_enu(10.0, 0.3);
  oracle::Rng rng(25);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat3 f = rng.admissible_f();
    // random rotation via QR of a random matrix
    Eigen::HouseholderQR<Mat3> qr(rng.mat3() + 2.0 * Mat3::Identity());
    Mat3 q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    const double w0 = neo_hookean(f, p)->energy;
    const double w1 = neo_hookean(Mat3(q * f), p)->energy;
    CHECK(w1 == doctest::Approx(w0).epsilon(1e-10));
  }
}

TEST_CASE("linear stress basics") {
  const auto p = LinearElasticParams::from_enu(1.0, 0.25);
  CHECK(linear_stress(Vec6::Zero(), p).norm() == 0.0);

  // hydrostatic response: sigma = 3 K eps_v for eps = e*I
  const double lambda = 1.0 * 0.25 / (1.25 * 0.5);
  const double mu = 1.0 / 2.5;
  const double k = lambda + 2.0 * mu / 3.0;
  const Vec6 eps = to_mandel(0.01 * Mat3::Identity());
  const Mat3 sig = from_mandel(linear_stress(eps, p));
  CHECK((sig - 3.0 * k * 0.01 * Mat3::Identity()).norm() <= 1e-14);

  oracle::Rng rng(26);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec6 e = to_mandel(rng.sym3());
    CHECK((linear_stress(e, p) - p.stiffness * e).norm() == 0.0);
  }
}

TEST_CASE("thermal flux sign convention") {
  CHECK(thermal_flux(Vec3::Zero(), ThermalParams::isotropic(2.0)).norm() ==
        0.0);
  const Vec3 g(1.0, -2.0, 0.5);
  CHECK((thermal_flux(g, ThermalParams::isotropic(1.0)) + g).norm() == 0.0);
  oracle::Rng rng(27);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat3 a = rng.mat3();
    const ThermalParams kp{a * a.transpose() + Mat3::Identity()};
    const Vec3 gg = rng.vec3();
    CHECK((thermal_flux(gg, kp) + kp.conductivity * gg).norm() == 0.0);
  }
}
