// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace combo {

Vec9 to_vector9(const Mat3& t) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[3 * i + j] = t(i, j);
  return v;
}

Mat3 from_vector9(const Vec9& v) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = v[3 * i + j];
  return t;
}

Vec6 to_mandel(const Mat3& s) {
  Vec6 v;
  v[0] = s(0, 0);
  v[1] = s(1, 1);
  v[2] = s(2, 2);
  v[3] = kSqrt2 * s(0, 1);
  v[4] = kSqrt2 * s(0, 2);
  v[5] = kSqrt2 * s(1, 2);
  return v;
}

Mat3 from_mandel(const Vec6& v) {
  Mat3 s;
  s(0, 0) = v[0];
  s(1, 1) = v[1];
  s(2, 2) = v[2];
  s(0, 1) = s(1, 0) = v[3] / kSqrt2;
  s(0, 2) = s(2, 0) = v[4] / kSqrt2;
  s(1, 2) = s(2, 1) = v[5] / kSqrt2;
  return s;
}

double det3(const Mat3& t) { return t.determinant(); }

Mat3 inv3(const Mat3& t) {
  const double d = t.determinant();
  if (std::abs(d) <= 1e-300) throw SingularMatrix("inv3: |det| <= 1e-300");
  Mat3 adj;
  adj(0, 0) = t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1);
  adj(0, 1) = t(0, 2) * t(2, 1) - t(0, 1) * t(2, 2);
  adj(0, 2) = t(0, 1) * t(1, 2) - t(0, 2) * t(1, 1);
  adj(1, 0) = t(1, 2) * t(2, 0) - t(1, 0) * t(2, 2);
  adj(1, 1) = t(0, 0) * t(2, 2) - t(0, 2) * t(2, 0);
  adj(1, 2) = t(0, 2) * t(1, 0) - t(0, 0) * t(1, 2);
  adj(2, 0) = t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0);
  adj(2, 1) = t(0, 1) * t(2, 0) - t(0, 0) * t(2, 1);
  adj(2, 2) = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
  return adj / d;
}

double det_lemma(const Mat3& t, const Vec3& u, const Vec3& v) {
  const Mat3 ti = inv3(t);
  return (1.0 + v.dot(ti * u)) * t.determinant();
}

Eig3 sym_eig3(const Mat3& m) {
  const double scale = m.norm();
  if ((m - m.transpose()).norm() > 1e-10 * (scale > 0 ? scale : 1.0))
    throw NotSymmetric("sym_eig3: input asymmetric beyond 1e-10");

  Eigen::SelfAdjointEigenSolver<Mat3> es;
  es.computeDirect(m);
  Vec3 lam = es.eigenvalues();
  Mat3 vec = es.eigenvectors();

  const double gap = std::min(lam[1] - lam[0], lam[2] - lam[1]);
  const double recon =
      (m - vec * lam.asDiagonal() * vec.transpose()).norm();
  if (gap < 1e-8 * scale || recon > 1e-11 * (scale > 0 ? scale : 1.0)) {
    // closely spaced eigenvalues: the analytic formulas lose orthogonality,
    // the iterative QL pass restores it
    es.compute(m);
    lam = es.eigenvalues();
    vec = es.eigenvectors();
  }
  return {lam, vec};
}

namespace {
constexpr int kPair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
inline double mweight(int a) { return a < 3 ? 1.0 : kSqrt2; }
inline std::size_t idx81(int i, int j, int k, int l) {
  return static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l);
}
}  // namespace

std::array<double, 81> mandel_to_full(const Mat6& c) {
  std::array<double, 81> f{};
  for (int a = 0; a < 6; ++a) {
    const int i = kPair[a][0], j = kPair[a][1];
    for (int b = 0; b < 6; ++b) {
      const int k = kPair[b][0], l = kPair[b][1];
      const double v = c(a, b) / (mweight(a) * mweight(b));
      f[idx81(i, j, k, l)] = v;
      f[idx81(j, i, k, l)] = v;
      f[idx81(i, j, l, k)] = v;
      f[idx81(j, i, l, k)] = v;
    }
  }
  return f;
}

Mat6 full_to_mandel(const std::array<double, 81>& f) {
  Mat6 c;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      c(a, b) = mweight(a) * mweight(b) *
                f[idx81(kPair[a][0], kPair[a][1], kPair[b][0], kPair[b][1])];
  return c;
}

Mat9 mandel_to_mat9(const Mat6& c) {
  const auto f = mandel_to_full(c);
  Mat9 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          m(3 * i + j, 3 * k + l) = f[idx81(i, j, k, l)];
  return m;
}

Mat93 jump_matrix9(const Vec3& n) {
  Mat93 d = Mat93::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d(3 * i + j, i) = n[j];
  return d;
}

Mat63 jump_matrix6(const Vec3& n) {
  Mat63 d = Mat63::Zero();
  d(0, 0) = n[0];
  d(1, 1) = n[1];
  d(2, 2) = n[2];
  d(3, 0) = n[1] / kSqrt2;
  d(3, 1) = n[0] / kSqrt2;
  d(4, 0) = n[2] / kSqrt2;
  d(4, 2) = n[0] / kSqrt2;
  d(5, 1) = n[2] / kSqrt2;
  d(5, 2) = n[1] / kSqrt2;
  return d;
}

}  // namespace combo
