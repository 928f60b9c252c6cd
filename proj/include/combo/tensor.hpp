// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>

#include "combo/errors.hpp"

namespace combo {

// 2-tensors are plain 3x3 matrices; their 9-vector image is row major
// (11, 12, 13, 21, ..., 33). Symmetric 2-tensors map to 6-vectors in the
// orthonormal Mandel order (11, 22, 33, sqrt2*12, sqrt2*13, sqrt2*23).
// 4-tensors use the matrix representation induced by those vectors.
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat93 = Eigen::Matrix<double, 9, 3>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Row-major flattening; preserves the inner product of general 2-tensors.
Vec9 to_vector9(const Mat3& t);
Mat3 from_vector9(const Vec9& v);

/// Mandel 6-vector of a symmetric 3x3 tensor; inner-product preserving.
Vec6 to_mandel(const Mat3& s);
Mat3 from_mandel(const Vec6& v);

double det3(const Mat3& t);

/// Inverse of a 3x3 matrix. Throws SingularMatrix for |det| <= 1e-300; any
/// physical admissibility threshold (J > 0) is the caller's business.
Mat3 inv3(const Mat3& t);

/// det(t + u v^T) evaluated through the matrix determinant lemma,
/// (1 + v^T t^{-1} u) det(t).
double det_lemma(const Mat3& t, const Vec3& u, const Vec3& v);

struct Eig3 {
  Vec3 eigenvalues;   // ascending
  Mat3 eigenvectors;  // columns, orthonormal
};

/// Eigendecomposition of a symmetric 3x3 matrix. Closed-form solve with an
/// iterative cleanup pass when eigenvalue gaps fall below 1e-8*||m|| or the
/// reconstruction drifts. Throws NotSymmetric if ||m - m^T|| > 1e-10*||m||.
Eig3 sym_eig3(const Mat3& m);

/// Expansion of a Mandel 6x6 into the full minor-symmetric C_{ijkl} array.
std::array<double, 81> mandel_to_full(const Mat6& c);
Mat6 full_to_mandel(const std::array<double, 81>& c);

/// Embeds a minor-symmetric 4-tensor (Mandel 6x6) into the 9x9 acting on
/// general 2-tensors: (C : sym(X)) flattened row major.
Mat9 mandel_to_mat9(const Mat6& c);

/// 9x3 jump matrix of a (x) N: D[(i,J),k] = delta_ik N_J.
Mat93 jump_matrix9(const Vec3& n);

/// 6x3 Mandel jump matrix of a (x)^s N.
Mat63 jump_matrix6(const Vec3& n);

inline std::size_t flat9(int i, int j) {
  return static_cast<std::size_t>(3 * i + j);
}

}  // namespace combo
