// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <cstdint>
#include <functional>

#include "combo/laminate.hpp"
#include "combo/materials.hpp"
#include "combo/tensor.hpp"

namespace oracle {

using combo::Mat3;
using combo::Mat6;
using combo::Mat9;
using combo::Vec3;
using combo::Vec6;
using combo::Vec9;

/// splitmix64-based test RNG; self-contained so that test data never depends
/// on library internals or libstdc++ distribution details.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double sym() { return 2.0 * unit() - 1.0; }

  Mat3 mat3(double scale = 1.0) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = scale * sym();
    return m;
  }
  Mat3 sym3(double scale = 1.0) {
    const Mat3 m = mat3(scale);
    return 0.5 * (m + m.transpose());
  }
  Vec3 vec3(double scale = 1.0) {
    return Vec3(scale * sym(), scale * sym(), scale * sym());
  }
  Vec3 unit_vec3() {
    while (true) {
      const Vec3 v = vec3();
      const double n = v.norm();
      if (n > 1e-3) return v / n;
    }
  }
  /// F = I + scale*random with det > 0.3
  Mat3 admissible_f(double scale = 0.3) {
    while (true) {
      const Mat3 f = Mat3::Identity() + mat3(scale);
      if (f.determinant() > 0.3) return f;
    }
  }
  Mat6 spd6(double shift = 3.0) {
    Mat6 a;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) a(i, j) = sym();
    return a * a.transpose() + shift * Mat6::Identity();
  }
};

/// Brute-force double contraction sum_ij S_ij E_ij.
inline double contract(const Mat3& s, const Mat3& e) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += s(i, j) * e(i, j);
  return acc;
}

/// Central finite differences of a matrix-valued map of F.
inline Mat9 fd_tangent(const std::function<Mat3(const Mat3&)>& p_of_f,
                       const Mat3& f, double h) {
  Mat9 a;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      Mat3 dp = Mat3::Zero();
      Mat3 fp = f, fm = f;
      fp(k, l) += h;
      fm(k, l) -= h;
      dp = (p_of_f(fp) - p_of_f(fm)) / (2.0 * h);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(3 * i + j, 3 * k + l) = dp(i, j);
    }
  return a;
}

/// Line-by-line transliteration of the reference linear-elastostatic
/// composite-boxel algebra (inputs in the doubled-shear 6x6 convention, the
/// one the snippet is exact in); converts from/to Mandel at the boundary.
inline Mat6 reference_small_strain_stiffness(const Mat6& c_plus_mandel,
                                             const Mat6& c_minus_mandel,
                                             double c_plus, const Vec3& n) {
  Mat6 v = Mat6::Identity();
  for (int i = 3; i < 6; ++i) v(i, i) = combo::kSqrt2;

  const Mat6 C1 = v * c_plus_mandel * v;   // inclusion
  const Mat6 C0 = v * c_minus_mandel * v;  // matrix
  const double c1 = c_plus;
  const double c0 = 1.0 - c1;

  Eigen::Matrix<double, 6, 3> N;
  N << n[0], 0, 0,
       0, n[1], 0,
       0, 0, n[2],
       n[1] / 2, n[0] / 2, 0,
       n[2] / 2, 0, n[0] / 2,
       0, n[2] / 2, n[1] / 2;

  const Mat3 K = (N.transpose() * (C0 / c0 + C1 / c1) * N)
                     .fullPivLu()
                     .solve(Mat3::Identity());
  const Mat6 C = (c0 * C0 + c1 * C1) -
                 (C0 - C1) * N * K * N.transpose() * (C0 - C1);

  Mat6 vi = Mat6::Identity();
  for (int i = 3; i < 6; ++i) vi(i, i) = 1.0 / combo::kSqrt2;
  return vi * C * vi;
}

/// Isotropic stiffness in Mandel form.
inline Mat6 iso_mandel(double lambda, double mu) {
  return combo::LinearElasticParams::isotropic(lambda, mu).stiffness;
}

}  // namespace oracle
