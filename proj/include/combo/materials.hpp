// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "combo/tensor.hpp"

namespace combo {

struct NeoHookeanParams {
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  static NeoHookeanParams from_enu(double e, double nu);
};

struct LinearElasticParams {
  Mat6 stiffness = Mat6::Zero();  // Mandel 6x6, SPD

  static LinearElasticParams isotropic(double lambda, double mu);
  static LinearElasticParams from_enu(double e, double nu);
};

struct ThermalParams {
  Mat3 conductivity = Mat3::Zero();  // symmetric positive definite

  static ThermalParams isotropic(double k);
};

struct HyperelasticEval {
  double energy = 0.0;
  Mat3 pk2 = Mat3::Zero();       // S, symmetric
  Mat6 stiffness = Mat6::Zero(); // dS/dE in Mandel form
};

/// Compressible Neo-Hooke: W = lambda/2 (ln J)^2 - mu ln J + mu/2 (tr C - 3).
/// Empty optional when det(F) <= 0 (inadmissible deformation).
std::optional<HyperelasticEval> neo_hookean(const Mat3& f,
                                            const NeoHookeanParams& p);

inline Mat3 pk2_to_pk1(const Mat3& f, const Mat3& s) { return f * s; }

/// First elasticity tensor A = dP/dF from (F, S, C):
/// A_{iJkL} = delta_ik S_JL + F_iM C_MJLQ F_kQ. Major symmetric for
/// hyperelastic inputs.
Mat9 tangent_pk1(const Mat3& f, const Mat3& s, const Mat6& c);

inline Vec6 linear_stress(const Vec6& eps, const LinearElasticParams& p) {
  return p.stiffness * eps;
}

/// Fourier's law, q = -kappa g.
inline Vec3 thermal_flux(const Vec3& g, const ThermalParams& p) {
  return -p.conductivity * g;
}

/// Pointwise constitutive law in terms of P(F), used by the cell solver and
/// the composite-boxel kernel. eval() returns false when F is inadmissible
/// for the law (the laminate Newton probes near-critical states, so this is
/// an expected outcome, not an exception).
class MaterialLaw {
 public:
  virtual ~MaterialLaw() = default;
  virtual bool eval(const Mat3& f, Mat3& p) const = 0;
  virtual bool eval_tangent(const Mat3& f, Mat3& p, Mat9& a) const = 0;
  /// Conservative bounds on the spectrum of dP/dF near f, used to pick the
  /// reference medium.
  virtual void spectrum_bounds(const Mat3& f, double& lo, double& hi) const = 0;
  virtual std::string name() const = 0;
};

class NeoHookeanLaw final : public MaterialLaw {
 public:
  explicit NeoHookeanLaw(NeoHookeanParams p) : p_(p) {}
  bool eval(const Mat3& f, Mat3& p) const override;
  bool eval_tangent(const Mat3& f, Mat3& p, Mat9& a) const override;
  void spectrum_bounds(const Mat3& f, double& lo, double& hi) const override;
  std::string name() const override { return "neo_hookean"; }
  const NeoHookeanParams& params() const { return p_; }

 private:
  NeoHookeanParams p_;
};

/// Small-strain elasticity evaluated on the deformation gradient field,
/// P(F) = C : sym(F - I). Admissible everywhere; tangent is constant.
class LinearElasticLaw final : public MaterialLaw {
 public:
  explicit LinearElasticLaw(LinearElasticParams p);
  bool eval(const Mat3& f, Mat3& p) const override;
  bool eval_tangent(const Mat3& f, Mat3& p, Mat9& a) const override;
  void spectrum_bounds(const Mat3& f, double& lo, double& hi) const override;
  std::string name() const override { return "linear"; }
  const LinearElasticParams& params() const { return p_; }

 private:
  LinearElasticParams p_;
  Mat9 a9_;
};

using MaterialPtr = std::shared_ptr<const MaterialLaw>;

}  // namespace combo
