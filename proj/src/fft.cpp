// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/fft.hpp"

#include <mutex>

#include "combo/errors.hpp"
#include "combo/parallel.hpp"

namespace combo {

namespace {
std::mutex plan_mutex;  // FFTW planning is not thread safe

void init_threads_once(int threads) {
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
  fftw_plan_with_nthreads(threads > 0 ? threads : max_threads());
}
}  // namespace

Fft3::Fft3(const std::array<std::int64_t, 3>& dims, int ncomp, int threads)
    : dims_(dims), ncomp_(ncomp) {
  n_ = dims[0] * dims[1] * dims[2];
  nc_ = dims[0] * dims[1] * (dims[2] / 2 + 1);
  real_ = fftw_alloc_real(static_cast<std::size_t>(ncomp_ * n_));
  cplx_ = fftw_alloc_complex(static_cast<std::size_t>(ncomp_ * nc_));
  if (!real_ || !cplx_) throw Error("Fft3: allocation failed");

  const int n[3] = {static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                    static_cast<int>(dims[2])};
  std::lock_guard<std::mutex> lock(plan_mutex);
  init_threads_once(threads);
  fwd_ = fftw_plan_many_dft_r2c(3, n, ncomp_, real_, nullptr, 1,
                                static_cast<int>(n_), cplx_, nullptr, 1,
                                static_cast<int>(nc_), FFTW_ESTIMATE);
  inv_ = fftw_plan_many_dft_c2r(3, n, ncomp_, cplx_, nullptr, 1,
                                static_cast<int>(nc_), real_, nullptr, 1,
                                static_cast<int>(n_), FFTW_ESTIMATE);
  if (!fwd_ || !inv_) throw Error("Fft3: planning failed");
}

Fft3::~Fft3() {
  std::lock_guard<std::mutex> lock(plan_mutex);
  if (fwd_) fftw_destroy_plan(fwd_);
  if (inv_) fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(cplx_);
}

void Fft3::forward() { fftw_execute(fwd_); }

void Fft3::inverse() {
  fftw_execute(inv_);
  const double scale = 1.0 / static_cast<double>(n_);
  const std::int64_t total = ncomp_ * n_;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) real_[i] *= scale;
}

}  // namespace combo
