// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstdint>

namespace combo {

/// Batched 3D real-to-complex transform over ncomp equally shaped component
/// arrays. Plans are created with FFTW_ESTIMATE so that planning (and hence
/// every run) is deterministic for a fixed thread count.
class Fft3 {
 public:
  Fft3(const std::array<std::int64_t, 3>& dims, int ncomp, int threads = 0);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::int64_t n_real() const { return n_; }
  std::int64_t n_complex() const { return nc_; }
  const std::array<std::int64_t, 3>& dims() const { return dims_; }
  int ncomp() const { return ncomp_; }

  double* real(int c) { return real_ + static_cast<std::ptrdiff_t>(c) * n_; }
  const double* real(int c) const {
    return real_ + static_cast<std::ptrdiff_t>(c) * n_;
  }
  std::complex<double>* cplx(int c) {
    return reinterpret_cast<std::complex<double>*>(cplx_) +
           static_cast<std::ptrdiff_t>(c) * nc_;
  }

  void forward();
  /// Unnormalized c2r followed by the 1/n scaling, so forward+inverse is the
  /// identity.
  void inverse();

 private:
  std::array<std::int64_t, 3> dims_;
  int ncomp_;
  std::int64_t n_;
  std::int64_t nc_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

}  // namespace combo
