// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/green.hpp"

#include <cmath>

#include "combo/errors.hpp"

namespace combo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

GreenOperator::GreenOperator(GreenKind kind, const SimGrid& grid)
    : kind_(kind), grid_(grid) {
  // The continuous symbol i*xi is odd in k except at the Nyquist index of an
  // even axis, which maps to itself under k -> -k. Keeping those modes would
  // break the conjugate symmetry of Gamma(tau) for real fields (and the
  // projector property), so they are annihilated; the difference-based
  // operators have symbols that are exactly conjugate-even and need no such
  // treatment.
  for (int a = 0; a < 3; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    const std::int64_t n = grid.dims[sa];
    const double h = grid.spacing(a);
    const double l = grid.lengths[sa];
    fwd_[sa].resize(static_cast<std::size_t>(n));
    avg_[sa].resize(static_cast<std::size_t>(n));
    xi_[sa].resize(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
      const auto sk = static_cast<std::size_t>(k);
      // exact values at k = 0 and at the Nyquist index keep the projector's
      // null modes exactly null
      if (k == 0) {
        fwd_[sa][sk] = 0.0;
        avg_[sa][sk] = 1.0;
        xi_[sa][sk] = 0.0;
        continue;
      }
      if (2 * k == n) {
        fwd_[sa][sk] = -2.0 / h;
        avg_[sa][sk] = 0.0;
        xi_[sa][sk] = 2.0 * kPi * static_cast<double>(k) / l;
        continue;
      }
      const double phi = 2.0 * kPi * static_cast<double>(k) /
                         static_cast<double>(n);
      const std::complex<double> e(std::cos(phi), std::sin(phi));
      fwd_[sa][sk] = (e - 1.0) / h;
      avg_[sa][sk] = 0.5 * (e + 1.0);
      const std::int64_t ks = 2 * k < n ? k : k - n;  // signed frequency
      xi_[sa][sk] = 2.0 * kPi * static_cast<double>(ks) / l;
    }
  }
}

void GreenOperator::apply_fourier(Fft3& fft) const {
  const auto& d = grid_.dims;
  const std::int64_t n3c = d[2] / 2 + 1;
  std::array<std::complex<double>*, 9> buf;
  for (int c = 0; c < 9; ++c) buf[static_cast<std::size_t>(c)] = fft.cplx(c);

  const bool staggered = kind_ == GreenKind::staggered;

#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t k1 = 0; k1 < d[0]; ++k1) {
    for (std::int64_t k2 = 0; k2 < d[1]; ++k2) {
      for (std::int64_t k3 = 0; k3 < n3c; ++k3) {
        const std::size_t idx = static_cast<std::size_t>(
            (k1 * d[1] + k2) * n3c + k3);
        const std::size_t s1 = static_cast<std::size_t>(k1);
        const std::size_t s2 = static_cast<std::size_t>(k2);
        const std::size_t s3 = static_cast<std::size_t>(k3);

        // forward symbol per axis (doubles as i*xi for the continuous case)
        std::complex<double> g[3];
        switch (kind_) {
          case GreenKind::continuous: {
            const bool nyquist =
                2 * k1 == d[0] || 2 * k2 == d[1] || 2 * k3 == d[2];
            if (nyquist) {
              for (int c = 0; c < 9; ++c)
                buf[static_cast<std::size_t>(c)][idx] = 0.0;
              continue;
            }
            g[0] = {0.0, xi_[0][s1]};
            g[1] = {0.0, xi_[1][s2]};
            g[2] = {0.0, xi_[2][s3]};
            break;
          }
          case GreenKind::rotated: {
            const auto a1 = avg_[0][s1], a2 = avg_[1][s2], a3 = avg_[2][s3];
            g[0] = fwd_[0][s1] * a2 * a3;
            g[1] = fwd_[1][s2] * a1 * a3;
            g[2] = fwd_[2][s3] * a1 * a2;
            break;
          }
          case GreenKind::staggered:
            g[0] = fwd_[0][s1];
            g[1] = fwd_[1][s2];
            g[2] = fwd_[2][s3];
            break;
        }

        const double den =
            std::norm(g[0]) + std::norm(g[1]) + std::norm(g[2]);
        if (den == 0.0) {
          for (int c = 0; c < 9; ++c) buf[static_cast<std::size_t>(c)][idx] = 0.0;
          continue;
        }

        for (int i = 0; i < 3; ++i) {
          // row symbol: staggered rows use D+ on the diagonal entry and D- on
          // the off-diagonal ones, D- = -conj(D+)
          std::complex<double> gr[3];
          for (int J = 0; J < 3; ++J) {
            gr[J] = (staggered && J != i) ? -std::conj(g[J]) : g[J];
          }
          std::complex<double> s = 0.0;
          for (int L = 0; L < 3; ++L)
            s += std::conj(gr[L]) * buf[static_cast<std::size_t>(3 * i + L)][idx];
          s /= den;
          for (int J = 0; J < 3; ++J)
            buf[static_cast<std::size_t>(3 * i + J)][idx] = gr[J] * s;
        }
      }
    }
  }
}

void GreenOperator::project(const Field9& in, Field9& out, Fft3& fft) const {
  const std::int64_t n = in.cells();
  for (int c = 0; c < 9; ++c) {
    const double* src = in.comp(c);
    double* dst = fft.real(c);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) dst[i] = src[i];
  }
  fft.forward();
  apply_fourier(fft);
  fft.inverse();
  if (out.cells() != n) out = Field9(in.grid);
  for (int c = 0; c < 9; ++c) {
    const double* src = fft.real(c);
    double* dst = out.comp(c);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) dst[i] = src[i];
  }
}

double equilibrium_residual(const Field9& p, const GreenOperator& green,
                            Fft3& fft, double floor) {
  Field9 proj(p.grid);
  green.project(p, proj, fft);
  const auto n = static_cast<std::size_t>(p.cells());
  double ss = 0.0;
  for (int c = 0; c < 9; ++c) ss += deterministic_sumsq(proj.comp(c), n);
  const double num = std::sqrt(ss / static_cast<double>(n));
  const double den = std::max(p.mean().norm(), floor);
  return num / den;
}

}  // namespace combo
