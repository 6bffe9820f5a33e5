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

#include <optional>
#include <utility>

#include "hydrochain/common.hpp"
#include "hydrochain/fourier.hpp"

namespace hydrochain {

// Fourier coefficients of elongations and momenta, indexed by j = n k.
struct ModeSpectrum {
  std::vector<cplx> r_hat;
  std::vector<cplx> p_hat;
};

// Configuration of the chain on the discrete circle. Time is macroscopic.
struct ChainState {
  std::vector<double> r;
  std::vector<double> p;
  double t = 0.0;
  // Fourier image of (r, p); engaged only while it matches r and p.
  std::optional<ModeSpectrum> modes;

  ChainState() = default;
  ChainState(std::vector<double> r_in, std::vector<double> p_in, double t_in = 0.0)
      : r(std::move(r_in)), p(std::move(p_in)), t(t_in) {
    require(!r.empty(), "chain state needs n >= 1");
    require(r.size() == p.size(), "r and p must have equal length");
  }

  static ChainState zeros(std::size_t n) {
    return ChainState(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
  }

  std::size_t size() const { return r.size(); }
};

inline ModeSpectrum compute_modes(const ChainState& s) {
  return {dft(std::span<const double>(s.r)), dft(std::span<const double>(s.p))};
}

inline ModeSpectrum dft(const ChainState& s) { return s.modes ? *s.modes : compute_modes(s); }

inline void refresh_modes(ChainState& s) { s.modes = compute_modes(s); }

inline ChainState idft(const ModeSpectrum& m, double t = 0.0) {
  require(m.r_hat.size() == m.p_hat.size() && !m.r_hat.empty(), "malformed mode spectrum");
  ChainState s(idft_real(m.r_hat), idft_real(m.p_hat), t);
  s.modes = m;
  return s;
}

inline std::vector<double> energy_per_site(const ChainState& s) {
  std::vector<double> e(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) e[x] = 0.5 * (s.p[x] * s.p[x] + s.r[x] * s.r[x]);
  return e;
}

inline double total_energy(const ChainState& s) { return pairwise_sum(energy_per_site(s)); }

inline double total_elongation(const ChainState& s) { return pairwise_sum(s.r); }

inline std::vector<cplx> wave_function(const ChainState& s) {
  std::vector<cplx> psi(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) psi[x] = {s.r[x], s.p[x]};
  return psi;
}

inline std::vector<cplx> wave_function_hat(const ChainState& s) {
  if (s.modes) {
    std::vector<cplx> out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = s.modes->r_hat[j] + cplx(0, 1) * s.modes->p_hat[j];
    return out;
  }
  const auto psi = wave_function(s);
  return dft(std::span<const cplx>(psi));
}

// Recovers (r^, p^) from psi^ through
//   r^(k) = (psi^(k) + psi^*(-k)) / 2,  p^(k) = (psi^(k) - psi^*(-k)) / (2i).
inline ModeSpectrum split_wave(std::span<const cplx> psi_hat) {
  const std::size_t n = psi_hat.size();
  ModeSpectrum m{std::vector<cplx>(n), std::vector<cplx>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const cplx a = psi_hat[j];
    const cplx b = std::conj(psi_hat[(n - j) % n]);
    m.r_hat[j] = 0.5 * (a + b);
    m.p_hat[j] = (a - b) / cplx(0, 2);
  }
  return m;
}

// Free harmonic flow of one Fourier mode:
//   r^' = c p^,  p^' = -conj(c) r^,  c = n^2 (1 - exp(-2 pi i k)) = omega e^{i phi},
// with omega = 2 n^2 sin(pi k) and e^{i phi} = i exp(-i pi k).
struct ModeRotation {
  std::size_t j = 0;
  std::size_t n = 1;
  double omega = 0.0;
  cplx phase{0.0, 1.0};

  static ModeRotation of(std::size_t j, std::size_t n) {
    require(n >= 1 && j < n, "mode index out of range");
    ModeRotation m;
    m.j = j;
    m.n = n;
    const auto ji = static_cast<std::int64_t>(j);
    const auto ni = static_cast<std::int64_t>(n);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    m.omega = 2.0 * nn * sin_pi_ratio(ji, ni);
    // i exp(-i pi j / n) = sin(pi j/n) + i cos(pi j/n)
    m.phase = {sin_pi_ratio(ji, ni), cos_pi_ratio(ji, ni)};
    return m;
  }

  double k() const { return static_cast<double>(j) / static_cast<double>(n); }
  cplx coupling() const { return omega * phase; }

  void advance(cplx& r_hat, cplx& p_hat, double dt) const {
    if (j == 0) return;  // generator vanishes on the DC mode
    const double c = std::cos(omega * dt);
    const double s = std::sin(omega * dt);
    const cplx r0 = r_hat;
    const cplx p0 = p_hat;
    r_hat = c * r0 + s * phase * p0;
    p_hat = -s * std::conj(phase) * r0 + c * p0;
  }
};

inline ChainState evolve_deterministic(const ChainState& s, double dt) {
  require(dt >= 0.0, "evolve_deterministic needs dt >= 0");
  ModeSpectrum m = dft(s);
  const std::size_t n = s.size();
  for (std::size_t j = 0; j < n; ++j) ModeRotation::of(j, n).advance(m.r_hat[j], m.p_hat[j], dt);
  return idft(m, s.t + dt);
}

// Velocity flip at site x; the cached spectrum gets the rank-one update
// p^(k) -= 2 p_x exp(-2 pi i k x).
inline void flip(ChainState& s, std::size_t x) {
  require(x < s.size(), "flip site out of range");
  const double px = s.p[x];
  s.p[x] = -px;
  if (s.modes && px != 0.0) {
    const auto n = static_cast<std::int64_t>(s.size());
    const auto xi = static_cast<std::int64_t>(x);
    for (std::int64_t j = 0; j < n; ++j) s.modes->p_hat[j] -= 2.0 * px * unit_root(j * xi, n);
  }
}

}  // namespace hydrochain
