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

#include <algorithm>
#include <limits>
#include <string>

#include "hydrochain/chain.hpp"
#include "hydrochain/profile.hpp"
#include "hydrochain/rng.hpp"

namespace hydrochain {

// Equilibrium elongation and energy per site at tension tau and inverse
// temperature beta: r = tau, e = 1/beta + tau^2/2.
inline double thermo_r(double tau, double beta) {
  require(beta > 0.0, "beta must be positive");
  return tau;
}

inline double thermo_e(double tau, double beta) {
  require(beta > 0.0, "beta must be positive");
  return 1.0 / beta + 0.5 * tau * tau;
}

// Grid used to certify positivity of temperature profiles.
inline std::size_t positivity_grid(std::size_t n) { return std::max<std::size_t>(n, 4096); }

inline void require_positive_temperature(const MacroProfile& temperature, std::size_t n) {
  require(temperature.min_on_grid(positivity_grid(n)) > 0.0, "temperature profile must be strictly positive");
}

// Product local Gibbs state: r_x ~ N(tau0(x/n), T0(x/n)), p_x ~ N(0, T0(x/n)),
// where T0 = 1/beta0 is the temperature profile. Draw order: r_x then p_x,
// site by site.
inline ChainState local_gibbs_sample(const MacroProfile& tension, const MacroProfile& temperature, std::size_t n,
                                     RandomStream& rng) {
  require(n >= 1, "chain needs n >= 1");
  require_positive_temperature(temperature, n);
  const auto tau = tension.sample(n);
  const auto temp = temperature.sample(n);
  ChainState s = ChainState::zeros(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double sd = std::sqrt(temp[x]);
    s.r[x] = rng.normal(tau[x], sd);
    s.p[x] = rng.normal(0.0, sd);
  }
  return s;
}

// Thermal energy spectrum of an ensemble:
//   u_n(k) = (2n)^-1 avg[|p^(k)|^2 + |r^(k) - avg r^(k)|^2]
// and the wave-function variant u~_n(k) = (2n)^-1 avg|psi^(k) - avg psi^(k)|^2.
// Averages use the 1/M normalization.
struct SpectrumReport {
  std::vector<double> u;
  std::vector<double> u_stderr;
  std::vector<double> u_wave;
  double l2_density = 0.0;
  double mean_energy = 0.0;  // n^-1 sum_k u_n(k)
  bool wave_bounds_hold = true;  // u~/2 <= u <= 2 u~ for every k
};

inline SpectrumReport thermal_spectrum_from_modes(std::span<const ModeSpectrum> ens) {
  require(ens.size() >= 2, "thermal spectrum needs at least two samples");
  const std::size_t n = ens[0].r_hat.size();
  const double m = static_cast<double>(ens.size());
  std::vector<cplx> mean_r(n, 0.0), mean_psi(n, 0.0);
  for (const auto& s : ens) {
    require(s.r_hat.size() == n && s.p_hat.size() == n, "ensemble members differ in size");
    for (std::size_t j = 0; j < n; ++j) {
      mean_r[j] += s.r_hat[j];
      mean_psi[j] += s.r_hat[j] + cplx(0, 1) * s.p_hat[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    mean_r[j] /= m;
    mean_psi[j] /= m;
  }
  SpectrumReport rep;
  rep.u.assign(n, 0.0);
  rep.u_stderr.assign(n, 0.0);
  rep.u_wave.assign(n, 0.0);
  const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    ScalarStats q;
    double w = 0.0;
    for (const auto& s : ens) {
      q.add(inv2n * (std::norm(s.p_hat[j]) + std::norm(s.r_hat[j] - mean_r[j])));
      w += std::norm(s.r_hat[j] + cplx(0, 1) * s.p_hat[j] - mean_psi[j]);
    }
    rep.u[j] = q.mean();
    rep.u_stderr[j] = q.stderr_of_mean();
    rep.u_wave[j] = inv2n * w / m;
    if (!(0.5 * rep.u_wave[j] <= rep.u[j] && rep.u[j] <= 2.0 * rep.u_wave[j])) rep.wave_bounds_hold = false;
  }
  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = rep.u[j] * rep.u[j];
  rep.l2_density = pairwise_sum(sq) / static_cast<double>(n);
  rep.mean_energy = pairwise_sum(rep.u) / static_cast<double>(n);
  return rep;
}

inline SpectrumReport thermal_spectrum(std::span<const ChainState> ens) {
  require(ens.size() >= 2, "thermal spectrum needs at least two samples");
  std::vector<ModeSpectrum> modes;
  modes.reserve(ens.size());
  for (const auto& s : ens) modes.push_back(dft(s));
  return thermal_spectrum_from_modes(modes);
}

struct AssumptionThresholds {
  // Largest tolerated |mean - expected| in units of the per-site standard error.
  double max_z = 5.0;
  // Largest tolerated n^-1 sum u^2 / (n^-1 sum u)^2; a flat spectrum gives ~1,
  // a spectrum carried by a single mode gives ~n.
  double max_l2_ratio = 4.0;
};

struct AssumptionReport {
  double mean_energy_per_site = 0.0;
  double max_abs_mean_momentum = 0.0;
  double max_momentum_z = 0.0;
  double max_abs_elongation_deviation = 0.0;
  double max_elongation_z = 0.0;
  double l2_density = 0.0;
  double l2_ratio = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the initial-law assumptions on an ensemble against the expected
// mean elongation profile r0: zero mean momenta, mean elongations r0(x/n),
// and a square-integrable thermal spectrum.
inline AssumptionReport check_assumptions(std::span<const ChainState> ens, const MacroProfile& r0,
                                          const AssumptionThresholds& th = {}) {
  AssumptionReport rep;
  if (ens.empty()) {
    rep.violations.push_back("empty ensemble");
    return rep;
  }
  const std::size_t n = ens[0].size();
  const auto r_expected = r0.sample(n);
  std::vector<double> site_energy(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    ScalarStats ps, rs;
    for (const auto& s : ens) {
      require(s.size() == n, "ensemble members differ in size");
      ps.add(s.p[x]);
      rs.add(s.r[x]);
      site_energy[x] += 0.5 * (s.p[x] * s.p[x] + s.r[x] * s.r[x]);
    }
    const double dp = std::abs(ps.mean());
    const double dr = std::abs(rs.mean() - r_expected[x]);
    rep.max_abs_mean_momentum = std::max(rep.max_abs_mean_momentum, dp);
    rep.max_abs_elongation_deviation = std::max(rep.max_abs_elongation_deviation, dr);
    const double sp = ps.stderr_of_mean();
    const double sr = rs.stderr_of_mean();
    if (sp > 0.0) rep.max_momentum_z = std::max(rep.max_momentum_z, dp / sp);
    else if (dp > 0.0) rep.max_momentum_z = std::numeric_limits<double>::infinity();
    if (sr > 0.0) rep.max_elongation_z = std::max(rep.max_elongation_z, dr / sr);
    else if (dr > 1e-12 * (1.0 + std::abs(r_expected[x]))) rep.max_elongation_z = std::numeric_limits<double>::infinity();
  }
  rep.mean_energy_per_site = pairwise_sum(site_energy) / (static_cast<double>(n) * static_cast<double>(ens.size()));
  if (ens.size() >= 2) {
    const SpectrumReport sp = thermal_spectrum(ens);
    rep.l2_density = sp.l2_density;
    // Below rounding level relative to the total energy the ratio is noise.
    const double floor = 1e-12 * (rep.mean_energy_per_site + std::numeric_limits<double>::min());
    rep.l2_ratio = sp.mean_energy > floor ? sp.l2_density / (sp.mean_energy * sp.mean_energy) : 0.0;
  }
  if (rep.max_momentum_z > th.max_z) rep.violations.push_back("mean momentum deviates from zero");
  if (rep.max_elongation_z > th.max_z) rep.violations.push_back("mean elongation deviates from the profile");
  if (rep.l2_ratio > th.max_l2_ratio) rep.violations.push_back("thermal spectrum concentrates on few modes");
  return rep;
}

}  // namespace hydrochain
