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

#include <array>

#include "hydrochain/chain.hpp"

namespace hydrochain {

// Exact propagator of the mean-wave dynamics for one mode k:
//   d/dt (r^, p^) = [[0, c], [-conj(c), -2 gamma n^2]] (r^, p^),
// i.e. the harmonic drift plus the velocity damping produced by the flips.
// With m = -gamma n^2 and D^2 = m^2 - |c|^2 the exponential is
//   exp(m t) [cosh(D t) I + sinh(D t) / D (A - m I)].
struct MeanWaveStep {
  std::array<cplx, 4> e{};  // row-major 2x2

  static MeanWaveStep of(std::size_t j, std::size_t n, double gamma, double dt) {
    const ModeRotation rot = ModeRotation::of(j, n);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double m = -gamma * nn;
    const double om = rot.omega;
    const cplx c = rot.coupling();
    const double d2 = m * m - om * om;
    double pm;  // exp(m t) cosh(D t) - m exp(m t) sinh(D t)/D
    double pp;  // exp(m t) cosh(D t) + m exp(m t) sinh(D t)/D
    double q;   // exp(m t) sinh(D t)/D
    if (d2 > 0.0) {
      const double d = std::sqrt(d2);
      const double am = -m;
      const double lam_slow = -(om * om) / (d + am);  // m + D without cancellation
      const double lam_fast = m - d;
      const double es = std::exp(lam_slow * dt);
      const double ef = std::exp(lam_fast * dt);
      if (d * dt < 1e-4) {
        const double x = d2 * dt * dt;
        q = std::exp(m * dt) * dt * (1.0 + x / 6.0 + x * x / 120.0);
      } else {
        q = (es - ef) / (2.0 * d);
      }
      pm = 0.5 * (es + ef) + am * q;
      // 0.5 (es + ef) - am q, regrouped to avoid cancellation for large t
      pp = (ef * (d + am) - es * (om * om) / (d + am)) / (2.0 * d);
      if (d * dt < 1e-4) pp = 0.5 * (es + ef) - am * q;
    } else if (d2 < 0.0) {
      const double nu = std::sqrt(-d2);
      const double em = std::exp(m * dt);
      const double ch = em * std::cos(nu * dt);
      q = em * std::sin(nu * dt) / nu;
      pm = ch - m * q;
      pp = ch + m * q;
    } else {
      const double em = std::exp(m * dt);
      q = em * dt;
      pm = em - m * q;
      pp = em + m * q;
    }
    MeanWaveStep s;
    s.e = {cplx(pm), c * q, -std::conj(c) * q, cplx(pp)};
    return s;
  }

  void apply(cplx& r, cplx& p) const {
    const cplx r0 = r;
    r = e[0] * r0 + e[1] * p;
    p = e[2] * r0 + e[3] * p;
  }
};

// Propagator for all modes at a fixed step, reusable across many steps.
class MeanWavePropagator {
 public:
  MeanWavePropagator(std::size_t n, double gamma, double dt) {
    require(n >= 1, "mean wave needs n >= 1");
    require(gamma > 0.0, "gamma must be positive");
    require(dt >= 0.0, "mean wave step needs dt >= 0");
    steps_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) steps_.push_back(MeanWaveStep::of(j, n, gamma, dt));
  }

  std::vector<cplx> apply(std::span<const cplx> psi_bar_hat) const {
    require(psi_bar_hat.size() == steps_.size(), "mean wave size mismatch");
    ModeSpectrum m = split_wave(psi_bar_hat);
    std::vector<cplx> out(psi_bar_hat.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      steps_[j].apply(m.r_hat[j], m.p_hat[j]);
      out[j] = m.r_hat[j] + cplx(0, 1) * m.p_hat[j];
    }
    return out;
  }

 private:
  std::vector<MeanWaveStep> steps_;
};

// Advances the ensemble-mean wave function psi_bar^ by dt. The pair (k, -k)
// is coupled through r^ = (psi^(k) + psi^*(-k))/2, p^ = (psi^(k) - psi^*(-k))/(2i).
inline std::vector<cplx> evolve_mean_wave(std::span<const cplx> psi_bar_hat, double dt, double gamma) {
  return MeanWavePropagator(psi_bar_hat.size(), gamma, dt).apply(psi_bar_hat);
}

}  // namespace hydrochain
