// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "combo/fft.hpp"
#include "combo/field.hpp"

namespace combo {

enum class GreenKind { continuous, rotated, staggered };

/// Periodic Green operator of the scalar reference medium C0 = alpha*I,
/// applied in Fourier space to a 9-component polarization field. All three
/// discretizations share the projector structure
///   (Gamma tau)_iJ = g^i_J conj(g^i_L) tau_iL / (alpha * sum_M |g_M|^2),
/// with the zero frequency (and any mode with vanishing symbol) mapped to 0:
///   continuous: g_J = i xi_J, the classical operator;
///   rotated:    forward differences averaged over the transverse plaquette
///               (the rotated scheme of Willot);
///   staggered:  forward/backward differences in the printed +/- pattern,
///               row i uses D+ on its diagonal entry.
/// alpha scales out of the projector; apply() realizes alpha * Gamma, i.e.
/// the orthogonal projection onto compatible fields for each discretization.
class GreenOperator {
 public:
  GreenOperator(GreenKind kind, const SimGrid& grid);

  GreenKind kind() const { return kind_; }
  const SimGrid& grid() const { return grid_; }

  /// In-place projection of the 9-component field held in fft's complex
  /// buffers (component c = 3i+J).
  void apply_fourier(Fft3& fft) const;

  /// out = alpha*Gamma(in) in real space (forward, project, inverse).
  void project(const Field9& in, Field9& out, Fft3& fft) const;

  /// Fourier symbol tables of the forward difference (e^{i phi}-1)/h per
  /// axis; the backward difference symbol is -conj of it.
  const std::vector<std::complex<double>>& forward_symbols(int axis) const {
    return fwd_[static_cast<std::size_t>(axis)];
  }

 private:
  GreenKind kind_;
  SimGrid grid_;
  // per-axis symbol tables over the full index range
  std::array<std::vector<std::complex<double>>, 3> fwd_;  // (e^{i phi}-1)/h
  std::array<std::vector<std::complex<double>>, 3> avg_;  // (1+e^{i phi})/2
  std::array<std::vector<double>, 3> xi_;                 // continuous freq
};

/// Scheme-consistent equilibrium residual:
/// ||projection of P||_L2-cell-average / max(||mean(P)||_F, floor).
double equilibrium_residual(const Field9& p, const GreenOperator& green,
                            Fft3& fft, double floor);

}  // namespace combo
