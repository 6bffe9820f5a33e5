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

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hydrochain/initial.hpp"
#include "hydrochain/laplace.hpp"
#include "hydrochain/macro_pde.hpp"
#include "hydrochain/matrix_checks.hpp"
#include "hydrochain/rng.hpp"
#include "hydrochain/wigner.hpp"

namespace hydrochain {
namespace {

std::vector<ChainState> gibbs_ensemble(const MacroProfile& tau, const MacroProfile& temp, std::size_t n,
                                       std::size_t m, std::uint64_t root) {
  std::vector<ChainState> ens;
  ens.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    RandomStream rng = RandomStream::for_trajectory(root, i);
    ens.push_back(local_gibbs_sample(tau, temp, n, rng));
  }
  return ens;
}

// ---------------------------------------------------------------------------
// Thermodynamic relations and local Gibbs sampling.

TEST(Thermo, TensionAndEnergy) {
  EXPECT_DOUBLE_EQ(thermo_r(2.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(thermo_e(2.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(thermo_e(0.0, 4.0), 0.25);
  for (double tau : {-1.5, 0.0, 0.3})
    for (double beta : {0.1, 1.0, 7.0}) EXPECT_GT(thermo_e(tau, beta) - 0.5 * tau * tau, 0.0);
  EXPECT_THROW(thermo_e(1.0, 0.0), Error);
}

TEST(LocalGibbs, DegenerateVarianceReproducesTension) {
  const MacroProfile tau = MacroProfile::cosine(1.0, 0.5, 1);
  RandomStream rng(1);
  const ChainState s = local_gibbs_sample(tau, MacroProfile::constant(1e-12), 64, rng);
  const auto ref = tau.sample(64);
  for (std::size_t x = 0; x < 64; ++x) {
    EXPECT_NEAR(s.r[x], ref[x], 1e-5);
    EXPECT_NEAR(s.p[x], 0.0, 1e-5);
  }
}

TEST(LocalGibbs, RejectsNonpositiveTemperature) {
  RandomStream rng(1);
  EXPECT_THROW(local_gibbs_sample(MacroProfile::constant(0.0), MacroProfile::cosine(0.5, 1.0, 1), 16, rng), Error);
}

TEST(LocalGibbs, HomogeneousMoments) {
  RandomStream rng(2024);
  const ChainState s = local_gibbs_sample(MacroProfile::constant(1.0), MacroProfile::constant(0.5), 10000, rng);
  ScalarStats r, p, e;
  for (std::size_t x = 0; x < s.size(); ++x) {
    r.add(s.r[x]);
    p.add(s.p[x]);
    e.add(0.5 * (s.r[x] * s.r[x] + s.p[x] * s.p[x]));
  }
  EXPECT_NEAR(r.mean(), 1.0, 4 * r.stderr_of_mean());
  EXPECT_NEAR(p.mean(), 0.0, 4 * p.stderr_of_mean());
  EXPECT_NEAR(e.mean(), 1.0, 4 * e.stderr_of_mean());
}

TEST(LocalGibbs, SiteVarianceFollowsTemperature) {
  const std::size_t n = 8, m = 10000;
  const MacroProfile temp = MacroProfile::cosine(1.0, 0.5, 1);
  const auto ens = gibbs_ensemble(MacroProfile::constant(0.2), temp, n, m, 5);
  const auto tv = temp.sample(n);
  for (std::size_t x = 0; x < n; ++x) {
    ScalarStats r;
    for (const auto& s : ens) r.add(s.r[x]);
    const double sd_var = tv[x] * std::sqrt(2.0 / (m - 1));
    EXPECT_NEAR(r.variance(), tv[x], 5 * sd_var) << "x=" << x;
  }
}

// ---------------------------------------------------------------------------
// Thermal spectrum and the initial-law diagnostics.

TEST(ThermalSpectrum, DeterministicEnsembleKeepsOnlyMomenta) {
  RandomStream rng(3);
  ChainState s = local_gibbs_sample(MacroProfile::constant(0.0), MacroProfile::constant(1.0), 12, rng);
  const std::vector<ChainState> ens(5, s);
  const SpectrumReport rep = thermal_spectrum(ens);
  const ModeSpectrum m = dft(s);
  for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(rep.u[j], std::norm(m.p_hat[j]) / 24.0, 1e-12);
  std::fill(s.p.begin(), s.p.end(), 0.0);
  const std::vector<ChainState> still(4, s);
  for (double u : thermal_spectrum(still).u) EXPECT_NEAR(u, 0.0, 1e-13);
}

TEST(ThermalSpectrum, HomogeneousGibbsIsFlat) {
  const double temp = 0.5;
  const auto ens = gibbs_ensemble(MacroProfile::constant(1.0), MacroProfile::constant(temp), 32, 4000, 9);
  const SpectrumReport rep = thermal_spectrum(ens);
  for (std::size_t j = 0; j < 32; ++j) {
    EXPECT_GE(rep.u[j], 0.0);
    EXPECT_NEAR(rep.u[j], temp, 5 * rep.u_stderr[j]) << "j=" << j;
  }
  EXPECT_TRUE(rep.wave_bounds_hold);
}

TEST(ThermalSpectrum, ParsevalMeanEnergy) {
  const auto ens = gibbs_ensemble(MacroProfile::cosine(0.5, 0.5, 2), MacroProfile::cosine(1.0, 0.3, 1), 16, 50, 4);
  const SpectrumReport rep = thermal_spectrum(ens);
  const std::size_t n = 16;
  const double m = static_cast<double>(ens.size());
  double direct = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double rbar = 0.0;
    for (const auto& s : ens) rbar += s.r[x];
    rbar /= m;
    for (const auto& s : ens) direct += s.p[x] * s.p[x] + (s.r[x] - rbar) * (s.r[x] - rbar);
  }
  direct /= 2.0 * static_cast<double>(n) * m;
  EXPECT_NEAR(rep.mean_energy, direct, 1e-12);
}

TEST(Assumptions, LocalGibbsPasses) {
  const MacroProfile tau = MacroProfile::cosine(1.0, 0.5, 1);
  const auto ens = gibbs_ensemble(tau, MacroProfile::cosine(1.0, 0.25, 1), 64, 400, 12);
  const AssumptionReport rep = check_assumptions(ens, tau);
  EXPECT_TRUE(rep.ok()) << (rep.violations.empty() ? "" : rep.violations.front());
  EXPECT_LT(rep.l2_ratio, 1.5);
}

TEST(Assumptions, SingleModeEnsembleIsFlagged) {
  // All thermal energy in k = 1/n with a random phase: the spectrum is a
  // single spike and the L2 density grows like n.
  const std::size_t n = 64;
  std::vector<ChainState> ens;
  RandomStream rng(8);
  for (int i = 0; i < 200; ++i) {
    const double th = kTwoPi * rng.uniform_open0();
    ChainState s = ChainState::zeros(n);
    for (std::size_t x = 0; x < n; ++x) {
      s.r[x] = std::cos(kTwoPi * x / n + th);
      s.p[x] = std::sin(kTwoPi * x / n + th);
    }
    ens.push_back(s);
  }
  const AssumptionReport rep = check_assumptions(ens, MacroProfile::constant(0.0));
  EXPECT_FALSE(rep.ok());
  EXPECT_GT(rep.l2_ratio, 0.25 * static_cast<double>(n));
}

TEST(Assumptions, ZeroTemperatureProfilePasses) {
  const MacroProfile tau = MacroProfile::cosine(1.0, 0.5, 1);
  ChainState s(tau.sample(32), std::vector<double>(32, 0.0));
  const std::vector<ChainState> ens(3, s);
  const AssumptionReport rep = check_assumptions(ens, tau);
  EXPECT_TRUE(rep.ok()) << (rep.violations.empty() ? "" : rep.violations.front());
  for (double u : thermal_spectrum(ens).u) EXPECT_NEAR(u, 0.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Wigner estimators.

TEST(Wigner, PlaneWave) {
  // psi_x = exp(2 pi i x / n): psi^ = n delta_{k, 1/n}, W+(eta, k) = (n/2) 1{eta = 0, k = 1/n}.
  const std::size_t n = 16;
  ChainState s = ChainState::zeros(n);
  for (std::size_t x = 0; x < n; ++x) {
    s.r[x] = std::cos(kTwoPi * x / n);
    s.p[x] = std::sin(kTwoPi * x / n);
  }
  const std::vector<ChainState> ens{s};
  const WignerField f = wigner_estimate(ens, 3);
  for (int eta = -3; eta <= 3; ++eta)
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = (eta == 0 && j == 1) ? n / 2.0 : 0.0;
      EXPECT_NEAR(std::abs(f.at(Species::WPlus, eta, j) - expected), 0.0, 1e-11);
    }
}

TEST(Wigner, ZeroStateGivesZeroField) {
  const std::vector<ChainState> ens{ChainState::zeros(8)};
  const WignerField f = wigner_estimate(ens, 2);
  for (Species s : kAllSpecies)
    for (int eta = -2; eta <= 2; ++eta)
      for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(f.at(s, eta, j), cplx(0.0));
}

TEST(Wigner, ReflectionSymmetryAndKAverages) {
  const auto ens = gibbs_ensemble(MacroProfile::cosine(0.2, 0.7, 1), MacroProfile::cosine(1.0, 0.3, 2), 24, 30, 2);
  const WignerField f = wigner_estimate(ens, 4);
  const std::size_t n = 24;
  for (int eta = -4; eta <= 4; ++eta) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jr = (n - j) % n;
      EXPECT_EQ(f.at(Species::WMinus, eta, j), std::conj(f.at(Species::WPlus, -eta, jr)));
      EXPECT_EQ(f.at(Species::YMinus, eta, j), std::conj(f.at(Species::YPlus, -eta, jr)));
    }
    EXPECT_NEAR(std::abs(f.k_average(Species::WPlus, eta) - f.k_average(Species::WMinus, eta)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(f.k_average(Species::WPlus, eta) - energy_fourier(ens, eta)), 0.0, 1e-12);
  }
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_GE(f.at(Species::WPlus, 0, j).real(), 0.0);
    EXPECT_NEAR(f.at(Species::WPlus, 0, j).imag(), 0.0, 1e-12);
  }
}

TEST(Wigner, AccumulatorMergeMatchesSinglePass) {
  const auto ens = gibbs_ensemble(MacroProfile::constant(0.5), MacroProfile::constant(1.0), 16, 40, 6);
  WignerAccumulator all(16, 2), a(16, 2), b(16, 2);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto h = wave_function_hat(ens[i]);
    all.add(h);
    (i < 13 ? a : b).add(h);
  }
  a.merge(b);
  const WignerField x = all.finalize(), y = a.finalize();
  for (int eta = -2; eta <= 2; ++eta)
    for (std::size_t j = 0; j < 16; ++j) {
      EXPECT_NEAR(std::abs(x.at(Species::WPlus, eta, j) - y.at(Species::WPlus, eta, j)), 0.0, 1e-12);
      EXPECT_NEAR(x.stderr_re(Species::YPlus, eta, j), y.stderr_re(Species::YPlus, eta, j), 1e-12);
    }
}

TEST(Wigner, PairingWithConstantIsMeanEnergy) {
  const auto ens = gibbs_ensemble(MacroProfile::cosine(1.0, 0.5, 1), MacroProfile::constant(0.7), 32, 20, 1);
  const WignerField f = wigner_estimate(ens, 2);
  double e = 0.0;
  for (const auto& s : ens) e += total_energy(s);
  e /= 32.0 * static_cast<double>(ens.size());
  EXPECT_NEAR(pair_with_test_function(f, TestFunction::separable(MacroProfile::constant(1.0))).real(), e, 1e-12);
  const cplx one = pair_with_test_function(f, TestFunction::single_mode(1));
  EXPECT_NEAR(std::abs(one - energy_fourier(ens, 1)), 0.0, 1e-12);
}

TEST(Wigner, PairingMatchesRealSpaceSum) {
  // For h(v) = 1 + cos(2 pi v) the k-sum becomes a nearest-neighbour kernel:
  //   n^-1 sum_k W+(eta, k) h(k) = (2n)^-1 sum_{x,y} psi_x conj(psi_y) e^{-2 pi i eta x/n} K(x - y),
  // K(0) = 1, K(+-1) = 1/2.
  const std::size_t n = 20;
  RandomStream rng(31);
  const ChainState s = local_gibbs_sample(MacroProfile::constant(0.3), MacroProfile::constant(1.0), n, rng);
  const std::vector<ChainState> ens{s};
  const WignerField f = wigner_estimate(ens, 3);
  const auto psi = wave_function(s);
  const auto h = [](double v) { return 1.0 + std::cos(kTwoPi * v); };
  for (int eta = -3; eta <= 3; ++eta) {
    cplx direct = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (int d = -1; d <= 1; ++d) {
        const std::size_t y = (x + n + static_cast<std::size_t>(d + 1) - 1) % n;
        const double kern = d == 0 ? 1.0 : 0.5;
        direct += psi[x] * std::conj(psi[y]) * unit_root(static_cast<std::int64_t>(x) * eta, static_cast<std::int64_t>(n)) * kern;
      }
    direct /= 2.0 * n;
    const cplx paired = pair_with_test_function(f, TestFunction::single_mode(eta, h));
    EXPECT_NEAR(std::abs(paired - direct), 0.0, 1e-10) << "eta=" << eta;
  }
}

TEST(Wigner, MeanFluctuationSplit) {
  RandomStream rng(4);
  const ChainState s = local_gibbs_sample(MacroProfile::constant(0.3), MacroProfile::constant(1.0), 16, rng);
  const std::vector<ChainState> det(4, s);
  const auto [bar, tilde] = mean_fluct_decompose(det, 2);
  for (Species sp : kAllSpecies)
    for (int eta = -2; eta <= 2; ++eta)
      for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(std::abs(tilde.at(sp, eta, j)), 0.0, 1e-12);
}

TEST(Wigner, FluctuationKAverageFollowsTemperature) {
  const MacroProfile temp = MacroProfile::cosine(1.0, 0.25, 1);
  const std::size_t n = 64;
  const auto ens = gibbs_ensemble(MacroProfile::cosine(1.0, 0.5, 1), temp, n, 2000, 17);
  const auto [bar, tilde] = mean_fluct_decompose(ens, 2);
  const WignerField exact = local_gibbs_fluctuation_wigner(temp, n, 2);
  EXPECT_NEAR(exact.k_average(Species::WPlus, 1).real(), 0.125, 1e-14);
  EXPECT_NEAR(exact.k_average(Species::WPlus, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(tilde.k_average(Species::WPlus, 0) - 1.0), 0.0, 0.03);
  EXPECT_NEAR(std::abs(tilde.k_average(Species::WPlus, 1) - 0.125), 0.0, 0.015);
}

TEST(Wigner, MeanSpeciesCoincideForRealProfile) {
  const WignerField f = discrete_profile_wigner(MacroProfile::cosine(1.0, 0.5, 2), 32, 3);
  for (int eta = -3; eta <= 3; ++eta)
    for (std::size_t j = 0; j < 32; ++j) {
      const cplx w = f.at(Species::WPlus, eta, j);
      EXPECT_NEAR(std::abs(f.at(Species::YPlus, eta, j) - w), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(f.at(Species::YMinus, eta, j) - w), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(f.at(Species::WMinus, eta, j) - w), 0.0, 1e-12);
    }
}

TEST(MacroWigner, ConstantAndCosine) {
  const MacroProfile c = MacroProfile::constant(1.5);
  EXPECT_NEAR(macro_wigner(c, 0, 0).real(), 1.125, 1e-15);
  EXPECT_EQ(macro_wigner(c, 1, 0), cplx(0.0));
  const MacroProfile cs = MacroProfile::cosine(0.0, 1.0, 1);
  EXPECT_NEAR(macro_wigner(cs, 0, 1).real(), 0.125, 1e-15);
  EXPECT_NEAR(macro_wigner(cs, 0, -1).real(), 0.125, 1e-15);
  cplx sum = 0.0;
  for (int xi = -2; xi <= 2; ++xi) sum += macro_wigner(cs, 0, xi);
  EXPECT_NEAR(sum.real(), 0.25, 1e-15);
}

TEST(MacroWigner, DiscretePairingConverges) {
  // sum_eta [W_n(r; eta, .) conj FG(eta, .)]_n -> (1/2) int r^2(u) conj G(u, 0) du.
  // r = 1 + cos(2 pi u)/2, G(u, v) = exp(2 pi i u) (1 + cos 2 pi v):
  //   (1/2) int r^2 e^{-2 pi i u} du * 2 = F(r^2)(1) = 1/2.
  const MacroProfile r = MacroProfile::cosine(1.0, 0.5, 1);
  const auto h = [](double v) { return 1.0 + std::cos(kTwoPi * v); };
  double prev = 1e9;
  for (std::size_t n : {16, 64, 256, 1024}) {
    const WignerField f = discrete_profile_wigner(r, n, 2);
    const cplx v = pair_with_test_function(f, TestFunction::single_mode(1, h));
    const double err = std::abs(v - 0.5);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

// ---------------------------------------------------------------------------
// Laplace transforms.

TEST(Laplace, WeightsExactForLinearData) {
  const double lambda = 3.0, horizon = 2.0;
  const auto g = uniform_grid(horizon, 40);
  const auto w = laplace_weights(g, lambda);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s0 += w[i];
    s1 += w[i] * g[i];
  }
  const double e = std::exp(-lambda * horizon);
  EXPECT_NEAR(s0, (1 - e) / lambda, 1e-14);
  EXPECT_NEAR(s1, (1 - e * (1 + lambda * horizon)) / (lambda * lambda), 1e-14);
  EXPECT_THROW(laplace_weights(g, 0.0), Error);
}

TEST(Laplace, ConstantAndExponentialSeries) {
  const double horizon = 1.6;
  const auto grid = uniform_grid(horizon, 400);
  const std::vector<double> lambdas{5.0, 10.0};
  WignerField w0(8, 1);
  for (Species s : kAllSpecies)
    for (int eta = -1; eta <= 1; ++eta)
      for (std::size_t j = 0; j < 8; ++j) w0.at(s, eta, j) = cplx(1.0 + j, eta);
  std::vector<WignerField> constant(grid.size(), w0), decaying, zero(grid.size(), WignerField(8, 1));
  const double a = 2.0;
  for (double t : grid) decaying.push_back(w0.combine(std::exp(-a * t), w0, 0.0));
  const auto lc = laplace_accumulate(constant, grid, lambdas);
  const auto ld = laplace_accumulate(decaying, grid, lambdas);
  const auto lz = laplace_accumulate(zero, grid, lambdas);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lam = lambdas[l];
    const cplx v = w0.at(Species::YPlus, 1, 3);
    EXPECT_NEAR(std::abs(lc.fields[l].at(Species::YPlus, 1, 3) - v * (1 - std::exp(-lam * horizon)) / lam), 0.0,
                1e-13);
    EXPECT_NEAR(std::abs(ld.fields[l].at(Species::YPlus, 1, 3) - v / (lam + a)), 0.0,
                std::abs(v) * (std::exp(-(lam + a) * horizon) / (lam + a) + 1e-5));
    EXPECT_LE(ld.quadrature_error[l], 1e-5);
    EXPECT_EQ(lz.fields[l].at(Species::WPlus, 0, 0), cplx(0.0));
    EXPECT_LE(std::abs(lc.fields[l].at(Species::WPlus, 0, 7)), 8.0 / lam);
  }
}

TEST(Laplace, QuadratureRequiresLongEnoughHorizon) {
  EXPECT_THROW(LaplaceQuadrature(uniform_grid(0.5, 100), {10.0}), Error);
  const LaplaceQuadrature q(default_laplace_grid(0.8, 10.0), {10.0});
  EXPECT_TRUE(q.has_error_estimate());
  EXPECT_NEAR(q.grid()[1], 4e-4, 1e-15);
  EXPECT_NEAR(q.tail_factor(0), std::exp(-8.0) / 10.0, 1e-18);
}

TEST(Laplace, MacroWignerExample) {
  // r0 = cos(2 pi u), gamma = 1, lambda = 1, eta = 0, xi = 1: (1/8) / (4 pi^2 + 1).
  const MacroProfile r0 = MacroProfile::cosine(0.0, 1.0, 1);
  const cplx v = laplace_macro(r0, 1.0, 1.0, 0, 1);
  EXPECT_NEAR(v.real(), 0.125 / (4 * kPi * kPi + 1), 1e-16);
  EXPECT_NEAR(v.real(), 3.08806e-3, 1e-8);
  const MacroProfile c = MacroProfile::constant(2.0);
  EXPECT_NEAR(laplace_macro(c, 1.0, 4.0, 0, 0).real(), 2.0 / 4.0, 1e-15);
}

TEST(Laplace, TargetsForConstantProfiles) {
  const auto t = mech_thermal_laplace_targets(MacroProfile::constant(1.5), MacroProfile::constant(0.7), 2.0, 4.0, 0);
  EXPECT_NEAR(t.mech.real(), 1.5 * 1.5 / (2 * 4.0), 1e-15);
  EXPECT_NEAR(t.thermal.real(), 0.7 / 4.0, 1e-15);
}

TEST(Laplace, MechanicalTargetAgreesWithTimeDomainQuadrature) {
  // Series form against int_0^inf e^{-lambda t} (1/2) F(r_t^2)(0) dt.
  const MacroProfile r0 = MacroProfile::cosine(1.0, 0.5, 1);
  const double gamma = 1.0, lambda = 10.0;
  const auto t = mech_thermal_laplace_targets(r0, MacroProfile::constant(1.0), gamma, lambda, 0);
  const SpectralField rf = SpectralField::from_profile(r0, 4);
  auto f = [&](double s) {
    const SpectralField r = solve_elongation(rf, gamma, s);
    double acc = 0.0;
    for (int xi = -4; xi <= 4; ++xi) acc += std::norm(r[xi]);
    return std::exp(-lambda * s) * 0.5 * acc;
  };
  using boost::math::quadrature::gauss_kronrod;
  const double q = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
  EXPECT_NEAR(t.mech.real(), q, 1e-6);
}

TEST(Laplace, DissipationAgreesWithConvolutionQuadrature) {
  const MacroProfile r0 = MacroProfile::from_coefficients({1.0, cplx(0.3, 0.1), cplx(0.0, -0.2)});
  const double gamma = 0.8, lambda = 6.0;
  const SpectralField rf = SpectralField::from_profile(r0, 8);
  using boost::math::quadrature::gauss_kronrod;
  for (int eta = 0; eta <= 3; ++eta) {
    auto part = [&](bool im) {
      return [&, im](double s) {
        const cplx g = grad_r_squared_fourier(solve_elongation(rf, gamma, s)).at(eta);
        return std::exp(-lambda * s) * 0.5 * (im ? g.imag() : g.real());
      };
    };
    const double re = gauss_kronrod<double, 61>::integrate(part(false), 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    const double im = gauss_kronrod<double, 61>::integrate(part(true), 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    EXPECT_NEAR(std::abs(dissipation_laplace(r0, gamma, lambda, eta) - cplx(re, im)), 0.0, 1e-8) << "eta=" << eta;
  }
}

}  // namespace
}  // namespace hydrochain
