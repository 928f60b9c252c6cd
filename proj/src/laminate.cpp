// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/laminate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace combo {

namespace {

Mat6 invert6(const Mat6& m, const char* where) {
  Eigen::FullPivLU<Mat6> lu(m);
  if (!lu.isInvertible()) throw SingularMatrix(where);
  return lu.inverse();
}

Mat3 invert3(const Mat3& m, const char* where) {
  Eigen::FullPivLU<Mat3> lu(m);
  if (!lu.isInvertible()) throw SingularMatrix(where);
  return lu.inverse();
}

}  // namespace

ComboMeta ComboMeta::make(const Vec3& n, double cp) {
  if (!(cp > 0.0) || !(cp < 1.0))
    throw Error("ComboMeta: volume fraction must lie in (0,1)");
  const double len = n.norm();
  if (!(len > 0.0)) throw Error("ComboMeta: zero normal");
  return ComboMeta{n / len, cp, 1.0 - cp};
}

Mat6 mix_voigt(const Mat6& cp, const Mat6& cm, double c) {
  return c * cp + (1.0 - c) * cm;
}

Mat6 mix_reuss(const Mat6& cp, const Mat6& cm, double c) {
  const Mat6 spi = invert6(cp, "mix_reuss: singular phase stiffness (+)");
  const Mat6 smi = invert6(cm, "mix_reuss: singular phase stiffness (-)");
  return invert6(c * spi + (1.0 - c) * smi, "mix_reuss: singular average");
}

Mat6 mix_hill(const Mat6& cp, const Mat6& cm, double c) {
  return 0.5 * (mix_voigt(cp, cm, c) + mix_reuss(cp, cm, c));
}

double milton_lambda_default(const Mat6& cp, const Mat6& cm) {
  Eigen::SelfAdjointEigenSolver<Mat6> ep(cp), em(cm);
  return 1.01 *
         std::max(ep.eigenvalues().maxCoeff(), em.eigenvalues().maxCoeff());
}

namespace {

/// Milton projector P_ijkl = sym(N delta N) - N (x) N (x) N (x) N in Mandel
/// form.
Mat6 milton_projector(const Vec3& n) {
  std::array<double, 81> full{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
          full[static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l)] =
              0.5 * (n[i] * d(j, k) * n[l] + n[i] * d(j, l) * n[k] +
                     n[j] * d(i, k) * n[l] + n[j] * d(i, l) * n[k]) -
              n[i] * n[j] * n[k] * n[l];
        }
  return full_to_mandel(full);
}

}  // namespace

Mat6 milton_laminate(const Mat6& cp, const Mat6& cm, double c, const Vec3& n,
                     double lambda) {
  Eigen::SelfAdjointEigenSolver<Mat6> ep(cp), em(cm);
  const double top =
      std::max(ep.eigenvalues().maxCoeff(), em.eigenvalues().maxCoeff());
  if (!(lambda > top))
    throw BadLambda("milton_laminate: lambda must exceed the largest phase "
                    "stiffness eigenvalue");
  const Mat6 proj = milton_projector(n.normalized());
  const Mat6 i6 = Mat6::Identity();
  auto y = [&](const Mat6& cc, const char* tag) {
    const Mat6 xi = invert6(cc - lambda * i6, tag);
    return invert6(proj + lambda * xi, tag);
  };
  const Mat6 avg = c * y(cp, "milton_laminate: phase +") +
                   (1.0 - c) * y(cm, "milton_laminate: phase -");
  const Mat6 z = invert6(avg, "milton_laminate: average") - proj;
  return lambda * i6 + lambda * invert6(z, "milton_laminate: back transform");
}

namespace {

Mat3 small_strain_hessian(const Mat6& cp, const Mat6& cm,
                          const ComboMeta& meta) {
  const Mat63 ds = jump_matrix6(meta.normal);
  return ds.transpose() * (cp / meta.c_plus + cm / meta.c_minus) * ds;
}

}  // namespace

Vec3 small_strain_jump(const Mat3& eps_box, const Mat6& cp, const Mat6& cm,
                       const ComboMeta& meta) {
  const Mat63 ds = jump_matrix6(meta.normal);
  const Mat3 delta = small_strain_hessian(cp, cm, meta);
  const Vec3 rhs = ds.transpose() * ((cm - cp) * to_mandel(eps_box));
  return invert3(delta, "small_strain_jump: singular Hessian") * rhs;
}

Mat6 small_strain_stiffness(const Mat6& cp, const Mat6& cm,
                            const ComboMeta& meta) {
  const Mat63 ds = jump_matrix6(meta.normal);
  const Mat3 delta = small_strain_hessian(cp, cm, meta);
  const Mat3 dinv = invert3(delta, "small_strain_stiffness: singular Hessian");
  const Mat6 dc = cp - cm;
  const Mat63 m = dc * ds;
  return mix_voigt(cp, cm, meta.c_plus) - m * dinv * m.transpose();
}

AdmissibleBounds admissibility_bounds(const Mat3& f_box,
                                      const ComboMeta& meta) {
  if (!(f_box.determinant() > 0.0))
    throw InadmissibleMacroState("admissibility_bounds: det(F_box) <= 0");
  const Vec3 w = inv3(f_box).transpose() * meta.normal;
  const double len = w.norm();
  AdmissibleBounds b;
  b.m_beta = w / len;
  b.beta_plus = -meta.c_plus / len;
  b.beta_minus = meta.c_minus / len;
  return b;
}

Vec3 back_project(const Vec3& a1, const Vec3& a0, const AdmissibleBounds& b) {
  const double beta1 = a1.dot(b.m_beta);
  const double beta0 = a0.dot(b.m_beta);
  const double beta_c = (beta1 <= b.beta_plus) ? b.beta_plus : b.beta_minus;
  const double beta_star = 0.5 * (beta0 + beta_c);
  return a1 + (beta_star - beta1) * b.m_beta;
}

Mat9 effective_tangent(const Mat9& a_plus, const Mat9& a_minus,
                       const ComboMeta& meta) {
  const Mat93 d = jump_matrix9(meta.normal);
  const Mat3 delta = d.transpose() *
                     (a_plus / meta.c_plus + a_minus / meta.c_minus) * d;
  const Mat3 dinv = invert3(delta, "effective_tangent: singular Hessian");
  const Mat9 da = a_plus - a_minus;
  const Mat93 m = da * d;
  return meta.c_plus * a_plus + meta.c_minus * a_minus -
         m * dinv * m.transpose();
}

LaminateSolution finite_strain_solve(const Mat3& f_box,
                                     const MaterialLaw& mat_plus,
                                     const MaterialLaw& mat_minus,
                                     const ComboMeta& meta, const Vec3& a0,
                                     const LaminateOptions& opt,
                                     bool want_tangent) {
  LaminateSolution sol;
  JumpVectorState& st = sol.state;
  const AdmissibleBounds bounds = admissibility_bounds(f_box, meta);
  const Vec3& n = meta.normal;

  Vec3 a = bounds.admissible(a0) ? a0 : Vec3::Zero();

  Mat3 fp, fm, pp, pm;
  Mat9 ap, am;
  auto update_phases = [&](const Vec3& jump) -> bool {
    fp = f_box + (jump * n.transpose()) / meta.c_plus;
    fm = f_box - (jump * n.transpose()) / meta.c_minus;
    return mat_plus.eval_tangent(fp, pp, ap) &&
           mat_minus.eval_tangent(fm, pm, am);
  };

  auto traction_scale = [&]() {
    return std::max({(pp * n).norm(), (pm * n).norm(), opt.stress_floor});
  };

  // absolute floor at the rounding noise of the stress evaluations: residuals
  // below eps * ||A|| * ||F|| cannot be resolved in double precision
  auto noise_floor = [&]() {
    constexpr double eps = 2.220446049250313e-16;
    return 16.0 * eps *
           std::max(ap.norm() * fp.norm(), am.norm() * fm.norm());
  };

  if (!update_phases(a)) {
    st.converged = false;
    st.residual = std::numeric_limits<double>::infinity();
    return sol;
  }

  Vec3 f = (pp - pm) * n;
  double best_res = f.norm();
  Vec3 best_a = a;
  st.residual = best_res;
  st.residual_rel = best_res / std::max(traction_scale(), 1e-300);

  auto converged = [&]() {
    return f.norm() <= opt.tol_abs + noise_floor() +
                           opt.tol_rel * std::max(traction_scale(), 1e-300);
  };

  const Mat93 d = jump_matrix9(n);
  int k = 0;
  bool ok = converged();
  while (!ok && k < opt.max_iter) {
    const Mat3 delta =
        d.transpose() * (ap / meta.c_plus + am / meta.c_minus) * d;
    Eigen::FullPivLU<Mat3> lu(delta);
    if (!lu.isInvertible()) break;
    Vec3 a1 = a - lu.solve(f);
    ++k;
    if (!bounds.admissible(a1)) {
      if (st.first_inadmissible_iter < 0) st.first_inadmissible_iter = k;
      if (!opt.back_projection) {
        // naive update left the admissible set; stop with the last state
        st.iterations = k;
        st.converged = false;
        st.a = a;
        st.residual = f.norm();
        st.residual_rel = st.residual / std::max(traction_scale(), 1e-300);
        return sol;
      }
      a1 = back_project(a1, a, bounds);
      ++st.back_projections;
    }
    a = a1;
    if (!update_phases(a)) break;  // cannot happen inside the bounds
    f = (pp - pm) * n;
    if (f.norm() < best_res) {
      best_res = f.norm();
      best_a = a;
    }
    ok = converged();
  }

  if (!ok) {
    // return the best iterate so the host can cut the load step
    if (best_a != a) {
      a = best_a;
      update_phases(a);
      f = (pp - pm) * n;
    }
  }

  st.a = a;
  st.converged = ok;
  st.iterations = k;
  st.residual = f.norm();
  st.residual_rel = st.residual / std::max(traction_scale(), 1e-300);

  LaminateResult& r = sol.result;
  r.f_plus = fp;
  r.f_minus = fm;
  r.p_plus = pp;
  r.p_minus = pm;
  r.p_box = meta.c_plus * pp + meta.c_minus * pm;
  const Mat3 s = inv3(f_box) * r.p_box;
  r.s_box = 0.5 * (s + s.transpose());
  r.traction = ok ? Vec3(pp * n) : Vec3(0.5 * (pp * n + pm * n));
  if (want_tangent) {
    r.a_box = effective_tangent(ap, am, meta);
    r.tangent_valid = true;
  }
  return sol;
}

ThermalLaminate thermal_jump(const Vec3& g_box, const ThermalParams& kp,
                             const ThermalParams& km, const ComboMeta& meta) {
  const Vec3& n = meta.normal;
  const double delta =
      n.dot((kp.conductivity / meta.c_plus + km.conductivity / meta.c_minus) *
            n);
  ThermalLaminate out;
  out.jump = n.dot((km.conductivity - kp.conductivity) * g_box) / delta;
  out.g_plus = g_box + (out.jump / meta.c_plus) * n;
  out.g_minus = g_box - (out.jump / meta.c_minus) * n;
  const Vec3 qp = thermal_flux(out.g_plus, kp);
  const Vec3 qm = thermal_flux(out.g_minus, km);
  out.q_box = meta.c_plus * qp + meta.c_minus * qm;
  const Mat3 dk = kp.conductivity - km.conductivity;
  const Vec3 dkn = dk * n;
  out.kappa_box = meta.c_plus * kp.conductivity +
                  meta.c_minus * km.conductivity -
                  (dkn * dkn.transpose()) / delta;
  return out;
}

}  // namespace combo
