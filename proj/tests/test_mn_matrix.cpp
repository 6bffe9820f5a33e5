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

#include <random>

#include "hydrochain/matrix_checks.hpp"
#include "hydrochain/verification.hpp"

namespace hydrochain {
namespace {

using LC = std::complex<long double>;
using LMat = std::array<std::array<LC, 4>, 4>;

constexpr long double kE[4] = {1, -1, -1, 1};

// Independent oracle: the matrix assembled straight from its definition in
// long double, inverted by Gauss-Jordan elimination with full pivoting.
LMat oracle_matrix(long double lambda, long double eta, long double j, long double n, long double gamma) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double k = j / n, kn = k + eta / n;
  const long double s0 = std::sin(pi * k), s1 = std::sin(pi * kn);
  const long double ds = 2 * n * (s1 * s1 - s0 * s0);
  const long double ss = 2 * (s1 * s1 + s0 * s0);
  const long double n2 = n * n;
  const LC a(lambda + 2 * gamma * n2, n * ds), b(lambda + 2 * gamma * n2, n2 * ss);
  const long double gp = gamma + std::sin(2 * pi * k), gm = gamma - std::sin(2 * pi * k);
  const long double gnp = gamma + std::sin(2 * pi * kn), gnm = gamma - std::sin(2 * pi * kn);
  return {{{a, -n2 * gm, -n2 * gnm, 0},
           {-n2 * gp, b, 0, -n2 * gnm},
           {-n2 * gnp, 0, std::conj(b), -n2 * gm},
           {0, -n2 * gnp, -n2 * gp, std::conj(a)}}};
}

struct OracleInverse {
  LMat inv;
  LC det;
};

OracleInverse gauss_jordan(LMat m) {
  LMat inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1;
  std::array<int, 4> col_of{0, 1, 2, 3};
  LC det = 1;
  for (int c = 0; c < 4; ++c) {
    int pr = c, pc = c;
    for (int r = c; r < 4; ++r)
      for (int q = c; q < 4; ++q)
        if (std::abs(m[r][q]) > std::abs(m[pr][pc])) pr = r, pc = q;
    if (pr != c) {
      std::swap(m[pr], m[c]);
      std::swap(inv[pr], inv[c]);
      det = -det;
    }
    if (pc != c) {
      for (int r = 0; r < 4; ++r) std::swap(m[r][pc], m[r][c]);
      std::swap(col_of[pc], col_of[c]);
      det = -det;
    }
    const LC p = m[c][c];
    det *= p;
    for (int q = 0; q < 4; ++q) {
      m[c][q] /= p;
      inv[c][q] /= p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const LC f = m[r][c];
      for (int q = 0; q < 4; ++q) {
        m[r][q] -= f * m[c][q];
        inv[r][q] -= f * inv[c][q];
      }
    }
  }
  // Column swaps permute the unknowns, i.e. the rows of the inverse.
  LMat out{};
  for (int i = 0; i < 4; ++i) out[col_of[i]] = inv[i];
  return {out, det};
}

TEST(BuildMn, SmallExample) {
  const auto m = build_mn<double>(1.0, 0, 0, 2, 1.0);
  const auto e = m.entries();
  EXPECT_EQ(e[0][0], cplx(9.0));
  EXPECT_EQ(e[0][1], cplx(-4.0));
  EXPECT_EQ(e[1][0], cplx(-4.0));
  EXPECT_EQ(e[1][1], cplx(9.0));
  EXPECT_EQ(e[0][2], cplx(-4.0));
  EXPECT_EQ(e[1][3], cplx(-4.0));
  EXPECT_EQ(e[2][0], cplx(-4.0));
  EXPECT_EQ(e[0][3], cplx(0.0));
  EXPECT_EQ(m.delta_s, 0.0);
  EXPECT_EQ(m.sigma_s, 0.0);
  EXPECT_EQ(m.delta_gamma, 0.0);
  EXPECT_THROW(build_mn<double>(0.0, 0, 0, 2, 1.0), Error);
  EXPECT_THROW(build_mn<double>(1.0, 0, 0, 0, 1.0), Error);
}

TEST(BuildMn, DeterminantExample) {
  const auto m = build_mn<double>(1.0, 0, 0, 2, 1.0);
  EXPECT_DOUBLE_EQ(m.det_formula(), 1377.0);
  EXPECT_NEAR(m.det_block_formula(), 1377.0, 1e-9);
  EXPECT_NEAR(std::abs(gauss_jordan(oracle_matrix(1, 0, 0, 2, 1)).det - 1377.0L), 0.0, 1e-9);
  EXPECT_NEAR(m.delta_normalized(), 1377.0 / 256.0, 1e-12);
}

TEST(BuildMn, InverseExample) {
  const auto m = build_mn<double>(1.0, 0, 0, 2, 1.0);
  const auto o = gauss_jordan(oracle_matrix(1, 0, 0, 2, 1));
  const auto raw = m.raw_inverse();
  const auto sc = m.scaled_inverse();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const cplx ref(static_cast<double>(o.inv[a][b].real()), static_cast<double>(o.inv[a][b].imag()));
      EXPECT_NEAR(std::abs(raw[a][b] - ref), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(sc[a][b] / 4.0 - ref), 0.0, 1e-10);
    }
}

TEST(BuildMn, HalfFrequencyNode) {
  const auto m = build_mn<double>(2.0, 0, 8, 16, 0.7);
  EXPECT_NEAR(m.sin_k, 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(m.g_plus, 0.7);
  EXPECT_DOUBLE_EQ(m.g_minus, 0.7);
  EXPECT_DOUBLE_EQ(m.gn_plus, 0.7);
  EXPECT_DOUBLE_EQ(m.gn_minus, 0.7);
}

TEST(BuildMn, RandomIdentitiesAgainstOracle) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> ul(0.05, 20.0), ug(0.2, 3.0);
  std::uniform_int_distribution<int> ue(-6, 6), un(1, 1024);
  double worst_det = 0, worst_inv = 0, worst_xi = 0;
  for (int s = 0; s < 1000; ++s) {
    const double lambda = ul(gen), gamma = ug(gen);
    const int eta = ue(gen);
    const std::int64_t n = un(gen);
    const std::int64_t j = std::uniform_int_distribution<std::int64_t>(0, n - 1)(gen);
    const auto m = build_mn<double>(lambda, eta, j, n, gamma);
    const auto o = gauss_jordan(oracle_matrix(lambda, eta, j, n, gamma));
    const double det_o = static_cast<double>(o.det.real());
    EXPECT_GT(m.det_formula(), 0.0);
    EXPECT_NEAR(static_cast<double>(o.det.imag()) / det_o, 0.0, 1e-12);
    worst_det = std::max(worst_det, std::abs(m.det_formula() - det_o) / det_o);
    const auto sc = m.scaled_inverse();
    const long double n2 = static_cast<long double>(n) * n;
    double scale = 0, diff = 0;
    LC xi_o = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const LC ref = o.inv[a][b] * n2;
        scale = std::max(scale, static_cast<double>(std::abs(ref)));
        diff = std::max(diff, static_cast<double>(std::abs(LC(sc[a][b]) - ref)));
        xi_o += kE[a] * ref;  // e^T M^-1 1
      }
    worst_inv = std::max(worst_inv, diff / scale);
    worst_xi = std::max(worst_xi, static_cast<double>(std::abs(LC(m.n2_e_minv_one()) - xi_o)) / scale);
    const auto r = build_mn<double>(lambda, -eta, -j, n, gamma);
    EXPECT_NEAR(r.gn_plus, m.gn_minus, 1e-15);
    EXPECT_NEAR(r.gn_minus, m.gn_plus, 1e-15);
    EXPECT_NEAR(r.g_plus, m.g_minus, 1e-15);
    EXPECT_NEAR(r.g_minus, m.g_plus, 1e-15);
  }
  EXPECT_LE(worst_det, 1e-9);
  EXPECT_LE(worst_inv, 1e-8);
  EXPECT_LE(worst_xi, 1e-8);
}

TEST(BuildMn, NormalizedAndRawRoutesAgree) {
  for (std::int64_t n : {4, 16, 64})
    for (std::int64_t j = 0; j < n; j += 3) {
      const auto m = build_mn<double>(3.0, 2, j, n, 1.1);
      const auto raw = m.raw_inverse(), sc = m.scaled_inverse();
      const double n2 = static_cast<double>(n * n);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_NEAR(std::abs(sc[a][b] - n2 * raw[a][b]), 0.0, 1e-9 * std::abs(sc[a][b]) + 1e-15);
    }
}

TEST(Limits, StatedValues) {
  EXPECT_NEAR(mean_pairing_limit(5.0, 1, 1.0, 2).real(), 24 * kPi * kPi / (5 + 26 * kPi * kPi), 1e-15);
  EXPECT_NEAR(mean_pairing_limit(5.0, 1, 1.0, 2).real(), 0.905435, 1e-6);
  EXPECT_EQ(mean_pairing_limit(5.0, 0, 1.0, 0), cplx(0.0));
  EXPECT_NEAR(sn_limit(5.0, 1, 1.0), 7.43480, 1e-5);
  EXPECT_DOUBLE_EQ(sn_limit(3.0, 0, 1.5), 1.0);
}

TEST(Limits, MeanPairingConvergesAtFirstOrder) {
  // Oracle evaluation of n^2 e.(M^-1 1) at k = xi/n; the error halves with n.
  double prev = 0;
  for (std::int64_t n : {64, 128, 256, 512}) {
    const auto o = gauss_jordan(oracle_matrix(5, 1, 2, n, 1));
    LC v = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) v += kE[a] * o.inv[a][b] * static_cast<long double>(n * n);
    const double err = std::abs(cplx(static_cast<double>(v.real()), static_cast<double>(v.imag())) -
                                mean_pairing_limit(5.0, 1, 1.0, 2));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 2.0, 0.2) << "n=" << n;
    }
    prev = err;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Limits, ERowAtFixedK) {
  for (std::int64_t n : {256, 4096}) {
    const auto row = n2_e_row(build_mn<long double>(5.0L, 1, n / 4, n, 1.0L));
    const double tol = 8.0 / static_cast<double>(n);
    EXPECT_NEAR(std::abs(row[0] - 0.5L), 0.0, tol);
    EXPECT_NEAR(std::abs(row[1]), 0.0, tol);
    EXPECT_NEAR(std::abs(row[2]), 0.0, tol);
    EXPECT_NEAR(std::abs(row[3] - 0.5L), 0.0, tol);
  }
}

TEST(Limits, SnAgainstOracleSum) {
  const std::int64_t n = 16;
  const double lambda = 5, gamma = 1;
  long double acc = 0;
  for (std::int64_t j = 0; j < n; ++j) {
    const auto o = gauss_jordan(oracle_matrix(lambda, 1, j, n, gamma));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) acc += (kE[a] * o.inv[a][b] * kE[b]).real();
  }
  const long double mn = acc / n;
  const long double n2 = static_cast<long double>(n) * n;
  const SnResult r = sn_check(lambda, 1, gamma, n);
  EXPECT_NEAR(r.s_n, static_cast<double>(n2 * (1 - gamma * n2 * mn)), 1e-9);
  EXPECT_NEAR(r.m_scalar, static_cast<double>(mn), 1e-15);
  EXPECT_LT(r.imag_part, 1e-12);
  EXPECT_LT(sn_check(lambda, 1, gamma, 4096).gap, sn_check(lambda, 1, gamma, 1024).gap);
  EXPECT_LT(sn_check(lambda, 0, gamma, 4096).gap, 0.01);
}

TEST(Limits, TrigClosure) {
  const TrigClosure t = trig_closure_integral();
  EXPECT_NEAR(t.reduced, 0.5, 1e-10);
  EXPECT_NEAR(t.unreduced, 0.5, 1e-10);
}

TEST(ThermalInitialTerm, DeterministicEnsembleGivesZero) {
  const WignerField zero(64, 1);
  const Z0Split z = z0_limit(zero, 5.0, 1, 1.0, 0.25, 0.0);
  EXPECT_EQ(z.value, cplx(0.0));
}

TEST(ThermalInitialTerm, ExactFieldApproachesTemperatureCoefficient) {
  // Homogeneous temperature T: limit T at eta = 0; cosine temperature: 1/8 at eta = 1.
  const MacroProfile flat = MacroProfile::constant(0.6);
  const MacroProfile cs = MacroProfile::cosine(1.0, 0.25, 1);
  double prev0 = 1e9, prev1 = 1e9;
  for (std::size_t n : {64, 256, 1024}) {
    const Z0Split z0 = z0_limit(local_gibbs_fluctuation_wigner(flat, n, 1), 5.0, 0, 1.0, 0.25, 0.6);
    const Z0Split z1 = z0_limit(local_gibbs_fluctuation_wigner(cs, n, 1), 5.0, 1, 1.0, 0.25, 0.125);
    const double e0 = std::abs(z0.value - 0.6), e1 = std::abs(z1.value - 0.125);
    EXPECT_LT(e0, prev0);
    EXPECT_LT(e1, prev1);
    EXPECT_NEAR(std::abs(z1.average_part - 0.125), 0.0, 1e-12);
    prev0 = e0;
    prev1 = e1;
  }
  EXPECT_LT(prev0, 0.02);
  EXPECT_LT(prev1, 0.01);
}

TEST(Suites, MatrixVerificationPasses) {
  MatrixSuiteOptions o;
  o.samples = 300;
  o.sweep_ns = dyadic_sizes(4, 10);
  o.z0_samples = 50;
  o.z0_n = 64;
  const auto recs = matrix_verification_suite(o);
  EXPECT_GE(recs.size(), 20u);
  std::size_t gated = 0;
  for (const auto& r : recs) {
    if (r.gated()) ++gated;
    EXPECT_TRUE(r.passed()) << r.check_id << " rel_err=" << r.rel_err;
  }
  EXPECT_GE(gated, 15u);
}

TEST(Suites, MeanSystemPasses) {
  for (const auto& r : mean_system_suite(MeanSystemOptions{}))
    EXPECT_TRUE(r.passed()) << r.check_id << " rel_err=" << r.rel_err;
}

}  // namespace
}  // namespace hydrochain
