// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/materials.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace combo {

NeoHookeanParams NeoHookeanParams::from_enu(double e, double nu) {
  if (!(e > 0.0) || !(nu > -1.0) || !(nu < 0.5))
    throw Error("neo_hookean: require E > 0 and -1 < nu < 0.5");
  NeoHookeanParams p;
  p.youngs_modulus = e;
  p.poisson_ratio = nu;
  p.lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  p.mu = e / (2.0 * (1.0 + nu));
  return p;
}

LinearElasticParams LinearElasticParams::isotropic(double lambda, double mu) {
  Mat6 c = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c(i, j) = lambda;
    c(i, i) += 2.0 * mu;
    c(i + 3, i + 3) = 2.0 * mu;  // Mandel shear blocks
  }
  return LinearElasticParams{c};
}

LinearElasticParams LinearElasticParams::from_enu(double e, double nu) {
  const auto nh = NeoHookeanParams::from_enu(e, nu);
  return isotropic(nh.lambda, nh.mu);
}

ThermalParams ThermalParams::isotropic(double k) {
  return ThermalParams{k * Mat3::Identity()};
}

std::optional<HyperelasticEval> neo_hookean(const Mat3& f,
                                            const NeoHookeanParams& p) {
  const double j = f.determinant();
  if (!(j > 0.0)) return std::nullopt;
  const Mat3 c = f.transpose() * f;
  const Mat3 ci = inv3(c);
  const double lnj = std::log(j);

  HyperelasticEval out;
  out.energy = 0.5 * p.lambda * lnj * lnj - p.mu * lnj +
               0.5 * p.mu * (c.trace() - 3.0);
  out.pk2 = p.lambda * lnj * ci + p.mu * (Mat3::Identity() - ci);

  // C_IJKL = lambda Ci_IJ Ci_KL + (mu - lambda lnJ)(Ci_IK Ci_JL + Ci_IL Ci_JK)
  const double g = p.mu - p.lambda * lnj;
  std::array<double, 81> full{};
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          full[static_cast<std::size_t>(((i * 3 + jj) * 3 + k) * 3 + l)] =
              p.lambda * ci(i, jj) * ci(k, l) +
              g * (ci(i, k) * ci(jj, l) + ci(i, l) * ci(jj, k));
  out.stiffness = full_to_mandel(full);
  return out;
}

Mat9 tangent_pk1(const Mat3& f, const Mat3& s, const Mat6& c) {
  const auto cf = mandel_to_full(c);
  auto at = [&cf](int m, int j, int l, int q) {
    return cf[static_cast<std::size_t>(((m * 3 + j) * 3 + l) * 3 + q)];
  };
  // t1_{iJLQ} = F_iM C_{MJLQ}
  std::array<double, 81> t1{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l)
        for (int q = 0; q < 3; ++q) {
          double v = 0.0;
          for (int m = 0; m < 3; ++m) v += f(i, m) * at(m, j, l, q);
          t1[static_cast<std::size_t>(((i * 3 + j) * 3 + l) * 3 + q)] = v;
        }
  Mat9 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = (i == k) ? s(j, l) : 0.0;
          for (int q = 0; q < 3; ++q)
            v += t1[static_cast<std::size_t>(((i * 3 + j) * 3 + l) * 3 + q)] *
                 f(k, q);
          a(3 * i + j, 3 * k + l) = v;
        }
  return a;
}

bool NeoHookeanLaw::eval(const Mat3& f, Mat3& p) const {
  const auto r = neo_hookean(f, p_);
  if (!r) return false;
  p = pk2_to_pk1(f, r->pk2);
  return true;
}

bool NeoHookeanLaw::eval_tangent(const Mat3& f, Mat3& p, Mat9& a) const {
  const auto r = neo_hookean(f, p_);
  if (!r) return false;
  p = pk2_to_pk1(f, r->pk2);
  a = tangent_pk1(f, r->pk2, r->stiffness);
  return true;
}

void NeoHookeanLaw::spectrum_bounds(const Mat3& f, double& lo,
                                    double& hi) const {
  Mat3 p;
  Mat9 a;
  if (eval_tangent(f, p, a)) {
    const Mat9 sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat9> es(sym);
    lo = es.eigenvalues().minCoeff();
    hi = es.eigenvalues().maxCoeff();
  } else {
    lo = p_.mu;
    hi = p_.lambda + 2.0 * p_.mu;
  }
}

LinearElasticLaw::LinearElasticLaw(LinearElasticParams p) : p_(p) {
  a9_ = mandel_to_mat9(p_.stiffness);
}

bool LinearElasticLaw::eval(const Mat3& f, Mat3& p) const {
  const Mat3 eps = 0.5 * (f + f.transpose()) - Mat3::Identity();
  p = from_mandel(linear_stress(to_mandel(eps), p_));
  return true;
}

bool LinearElasticLaw::eval_tangent(const Mat3& f, Mat3& p, Mat9& a) const {
  eval(f, p);
  a = a9_;
  return true;
}

void LinearElasticLaw::spectrum_bounds(const Mat3&, double& lo,
                                       double& hi) const {
  Eigen::SelfAdjointEigenSolver<Mat6> es(p_.stiffness);
  // the 9x9 embedding adds a zero eigenvalue on the skew subspace
  lo = std::min(0.0, es.eigenvalues().minCoeff());
  hi = es.eigenvalues().maxCoeff();
}

}  // namespace combo
