// Copyright 2026 The hydrochain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "hydrochain/common.hpp"

namespace hydrochain {

// Discrete Fourier transform on the circle of n sites with the convention
//   f^(k) = sum_x f_x exp(-2 pi i x k),  k in {0, 1/n, ..., (n-1)/n},
// inverse f_x = n^-1 sum_k f^(k) exp(2 pi i x k). Modes are addressed by the
// integer index j = n k.
class FourierPlan {
 public:
  explicit FourierPlan(std::size_t n) : n_(n) {
    require(n >= 1, "fourier transform needs n >= 1");
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(ni, a, b, FFTW_FORWARD, kFlags);
    backward_ = fftw_plan_dft_1d(ni, a, b, FFTW_BACKWARD, kFlags);
    fftw_free(a);
    fftw_free(b);
  }
  FourierPlan(const FourierPlan&) = delete;
  FourierPlan& operator=(const FourierPlan&) = delete;
  ~FourierPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  std::size_t size() const { return n_; }

  // in and out must not alias.
  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(forward_, to_fftw(in), reinterpret_cast<fftw_complex*>(out));
  }
  void inverse(const cplx* in, cplx* out) const {
    fftw_execute_dft(backward_, to_fftw(in), reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= s;
  }

 private:
  // fftw_execute_dft takes non-const input but does not write to it for
  // out-of-place plans.
  static fftw_complex* to_fftw(const cplx* p) {
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
  }

  std::size_t n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Process-wide plan cache. Planning is not thread-safe in FFTW, execution is.
inline const FourierPlan& fourier_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FourierPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FourierPlan>(n);
  return *slot;
}

inline std::vector<cplx> dft(std::span<const cplx> f) {
  std::vector<cplx> out(f.size());
  if (!f.empty()) fourier_plan(f.size()).forward(f.data(), out.data());
  return out;
}

inline std::vector<cplx> dft(std::span<const double> f) {
  std::vector<cplx> in(f.begin(), f.end());
  return dft(std::span<const cplx>(in));
}

inline std::vector<cplx> idft(std::span<const cplx> f) {
  std::vector<cplx> out(f.size());
  if (!f.empty()) fourier_plan(f.size()).inverse(f.data(), out.data());
  return out;
}

// Real part of the inverse transform, for spectra of real sequences.
inline std::vector<double> idft_real(std::span<const cplx> f) {
  const auto z = idft(f);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

// exp(-2 pi i m / n) with exact integer range reduction.
inline cplx unit_root(std::int64_t m, std::int64_t n) {
  return {cos_pi_ratio(2 * m, n), -sin_pi_ratio(2 * m, n)};
}

}  // namespace hydrochain
