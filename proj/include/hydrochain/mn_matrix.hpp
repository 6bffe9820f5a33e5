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
#include <cstdint>

#include "hydrochain/common.hpp"

namespace hydrochain {

template <class Real>
using Mat4 = std::array<std::array<std::complex<Real>, 4>, 4>;
template <class Real>
using Vec4 = std::array<std::complex<Real>, 4>;

// LU factorization with partial pivoting of a 4x4 complex matrix; the
// independent oracle for determinants and inverses.
template <class Real>
class Lu4 {
 public:
  using C = std::complex<Real>;

  explicit Lu4(const Mat4<Real>& m) : lu_(m) {
    for (int i = 0; i < 4; ++i) perm_[i] = i;
    for (int col = 0; col < 4; ++col) {
      int piv = col;
      for (int r = col + 1; r < 4; ++r)
        if (std::abs(lu_[r][col]) > std::abs(lu_[piv][col])) piv = r;
      if (piv != col) {
        std::swap(lu_[piv], lu_[col]);
        std::swap(perm_[piv], perm_[col]);
        sign_ = -sign_;
      }
      if (lu_[col][col] == C(0)) {
        singular_ = true;
        continue;
      }
      for (int r = col + 1; r < 4; ++r) {
        lu_[r][col] /= lu_[col][col];
        for (int c = col + 1; c < 4; ++c) lu_[r][c] -= lu_[r][col] * lu_[col][c];
      }
    }
  }

  bool singular() const { return singular_; }

  C det() const {
    C d = sign_;
    for (int i = 0; i < 4; ++i) d *= lu_[i][i];
    return d;
  }

  Vec4<Real> solve(const Vec4<Real>& b) const {
    require(!singular_, "singular 4x4 system");
    Vec4<Real> y;
    for (int i = 0; i < 4; ++i) {
      C s = b[perm_[i]];
      for (int c = 0; c < i; ++c) s -= lu_[i][c] * y[c];
      y[i] = s;
    }
    for (int i = 3; i >= 0; --i) {
      C s = y[i];
      for (int c = i + 1; c < 4; ++c) s -= lu_[i][c] * y[c];
      y[i] = s / lu_[i][i];
    }
    return y;
  }

  Mat4<Real> inverse() const {
    Mat4<Real> inv{};
    for (int c = 0; c < 4; ++c) {
      Vec4<Real> e{};
      e[c] = 1;
      const Vec4<Real> col = solve(e);
      for (int r = 0; r < 4; ++r) inv[r][c] = col[r];
    }
    return inv;
  }

 private:
  Mat4<Real> lu_;
  std::array<int, 4> perm_{};
  int sign_ = 1;
  bool singular_ = false;
};

template <class Real>
Mat4<Real> mat_mul(const Mat4<Real>& a, const Mat4<Real>& b) {
  Mat4<Real> c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int l = 0; l < 4; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

template <class Real>
Vec4<Real> mat_vec(const Mat4<Real>& a, const Vec4<Real>& v) {
  Vec4<Real> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += a[i][j] * v[j];
  return r;
}

template <class Real>
Real frobenius_distance_to_identity(const Mat4<Real>& a) {
  Real s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += std::norm(a[i][j] - std::complex<Real>(i == j ? 1 : 0));
  return std::sqrt(s);
}

template <class Real>
Vec4<Real> ones4() {
  return {Real(1), Real(1), Real(1), Real(1)};
}
// e = [1, -1, -1, 1]
template <class Real>
Vec4<Real> e4() {
  return {Real(1), Real(-1), Real(-1), Real(1)};
}
// u = [1, 0, 0, 1]
template <class Real>
Vec4<Real> u4() {
  return {Real(1), Real(0), Real(0), Real(1)};
}

template <class Real>
std::complex<Real> dot4(const Vec4<Real>& a, const Vec4<Real>& b) {
  std::complex<Real> s = 0;
  for (int i = 0; i < 4; ++i) s += a[i] * b[i];
  return s;
}

// Normalized inverse coefficients, each divided by n^6.
template <class Real>
struct MnCoefficients {
  std::complex<Real> d_plus, d_minus, d, d0, c, c0;
};

// The Laplace-domain matrix of the Wigner system at (lambda, eta, k = j/n):
//   M = [[A, -n^2 g_n^- Id], [-n^2 g_n^+ Id, B]],
//   A = [[a, -n^2 g^-], [-n^2 g^+, b]],  B = [[b*, -n^2 g^-], [-n^2 g^+, a*]],
//   a = lambda + i n ds + 2 gamma n^2,  b = lambda + i n^2 ss + 2 gamma n^2,
//   g^+- = gamma +- sin(2 pi k),  g_n^+- = gamma +- sin(2 pi (k + eta/n)).
// All trigonometric values are reduced in exact integer arithmetic, so k may
// be given by any integer j (negative j is k = j/n mod 1).
template <class Real = double>
struct MnMatrix {
  using C = std::complex<Real>;

  Real lambda = 0, gamma = 0;
  std::int64_t eta = 0, j = 0, n = 1;
  C a, b;
  Real g_plus = 0, g_minus = 0, gn_plus = 0, gn_minus = 0;
  Real sin_k = 0;         // sin(2 pi k)
  Real sin_kn = 0;        // sin(2 pi (k + eta/n))
  Real delta_s = 0;       // 2 n (sin^2(pi (k + eta/n)) - sin^2(pi k))
  Real sigma_s = 0;       // 2 (sin^2(pi (k + eta/n)) + sin^2(pi k))
  Real delta_gamma = 0;   // n (sin^2(2 pi (k + eta/n)) - sin^2(2 pi k))
  Real big_gamma = 0;     // n^2 (2 sin^2(2 pi k) + 2 sin^2(2 pi (k + eta/n)) + ss^2)

  Real nr() const { return static_cast<Real>(n); }
  Real k() const { return static_cast<Real>(wrap_index(j, n)) / nr(); }

  // Raw 4x4 entries.
  Mat4<Real> entries() const {
    const Real n2 = nr() * nr();
    return scaled_entries_impl(n2, a, b);
  }

  // Entries divided by n^2; O(1) for every n.
  Mat4<Real> entries_over_n2() const {
    const Real n2 = nr() * nr();
    return scaled_entries_impl(Real(1), a / n2, b / n2);
  }

  // Normalized coefficients d/n^6 from a/n^2, b/n^2 and dg/n.
  MnCoefficients<Real> coefficients() const {
    const Real n2 = nr() * nr();
    const C ah = a / n2, bh = b / n2;
    const Real dg = delta_gamma / nr();
    const Real gg = g_minus * g_plus;
    MnCoefficients<Real> r;
    r.d_plus = std::conj(ah) * std::norm(bh) + std::conj(bh) * dg - Real(2) * gg * ah.real();
    r.d_minus = std::conj(bh) * std::norm(ah) + std::conj(ah) * dg - Real(2) * gg * bh.real();
    r.d = Real(2) * std::conj(ah) * ah.real() - std::conj(ah) * bh - dg;
    r.d0 = Real(2) * std::conj(bh) * bh.real() - ah * std::conj(bh) - dg;
    r.c = ah * std::conj(bh) + dg;
    r.c0 = Real(2) * ah.real();
    return r;
  }

  // Unnormalized coefficients straight from a, b (overflow-prone for large n).
  MnCoefficients<Real> raw_coefficients() const {
    const Real nn = nr();
    const Real n2 = nn * nn, n3 = n2 * nn, n4 = n2 * n2, n5 = n4 * nn;
    const Real gg = g_minus * g_plus;
    MnCoefficients<Real> r;
    r.d_plus = std::conj(a) * std::norm(b) + n3 * std::conj(b) * delta_gamma - Real(2) * gg * n4 * a.real();
    r.d_minus = std::conj(b) * std::norm(a) + n3 * std::conj(a) * delta_gamma - Real(2) * gg * n4 * b.real();
    r.d = Real(2) * n2 * std::conj(a) * a.real() - n2 * std::conj(a) * b - n5 * delta_gamma;
    r.d0 = Real(2) * n2 * std::conj(b) * b.real() - n2 * a * std::conj(b) - n5 * delta_gamma;
    r.c = n2 * a * std::conj(b) + n5 * delta_gamma;
    r.c0 = Real(2) * n4 * a.real();
    return r;
  }

  // det M from the sum-of-squares expression
  //   n^6 (ds ss + dg)^2 + (lambda + 2 gamma n^2)^2 {lambda^2 + n^2 (4 gamma lambda + ds^2)
  //     + n^4 (2 sin^2(2 pi k) + 2 sin^2(2 pi (k + eta/n)) + ss^2)}.
  Real det_formula() const {
    const Real nn = nr(), n2 = nn * nn, n4 = n2 * n2, n6 = n4 * n2;
    const Real x = delta_s * sigma_s + delta_gamma;
    const Real rr = lambda + 2 * gamma * n2;
    const Real brace = lambda * lambda + n2 * (4 * gamma * lambda + delta_s * delta_s) +
                       n4 * (2 * sin_k * sin_k + 2 * sin_kn * sin_kn + sigma_s * sigma_s);
    return n6 * x * x + rr * rr * brace;
  }

  // det M = |a b* + n^3 dg|^2 - 4 n^4 g^+ g^- (Re a)^2 (block formula).
  Real det_block_formula() const {
    const Real nn = nr(), n2 = nn * nn;
    return std::norm(a * std::conj(b) + n2 * nn * delta_gamma) -
           4 * n2 * n2 * g_plus * g_minus * a.real() * a.real();
  }

  // Delta_n = det M / n^8, evaluated without forming n^8.
  Real delta_normalized() const {
    const Real nn = nr(), n2 = nn * nn;
    const Real x = delta_s * sigma_s + delta_gamma;
    const Real rh = lambda / n2 + 2 * gamma;
    const Real brace = lambda * lambda / (n2 * n2) + (4 * gamma * lambda + delta_s * delta_s) / n2 +
                       (2 * sin_k * sin_k + 2 * sin_kn * sin_kn + sigma_s * sigma_s);
    return x * x / n2 + rh * rh * brace;
  }

  // Leading terms of Delta_n:
  //   n^-2 {4 gamma^2 Gamma + 4 gamma^2 (4 lambda gamma + ds^2) + (ds ss + dg)^2}
  //   + 4 gamma lambda Gamma / n^4.
  Real delta_leading() const {
    const Real nn = nr(), n2 = nn * nn;
    const Real x = delta_s * sigma_s + delta_gamma;
    const Real g2 = gamma * gamma;
    return (4 * g2 * big_gamma + 4 * g2 * (4 * lambda * gamma + delta_s * delta_s) + x * x) / n2 +
           4 * gamma * lambda * big_gamma / (n2 * n2);
  }

  // n^2 M^-1 from the closed-form coefficient table, normalized throughout.
  Mat4<Real> scaled_inverse() const { return inverse_table(coefficients(), delta_normalized()); }

  // M^-1 from the raw coefficients and raw determinant.
  Mat4<Real> raw_inverse() const { return inverse_table(raw_coefficients(), det_formula()); }

  // Xi_n / n^6, so that n^2 e.(M^-1 1) = (Xi_n / n^6) / Delta_n.
  C xi_normalized() const {
    const Real nn = nr(), n2 = nn * nn;
    const C i(0, 1);
    const Real rh = lambda / n2 + 2 * gamma;
    return rh * (Real(2) * (sigma_s * sigma_s - delta_s * delta_s / n2) + Real(4) * i * (sin_k - sin_kn) * sigma_s +
                 Real(4) * i * (sin_kn + sin_k) * delta_s / nn + Real(8) * sin_k * sin_kn);
  }

  C n2_e_minv_one() const { return xi_normalized() / delta_normalized(); }

 private:
  Mat4<Real> scaled_entries_impl(Real n2, C aa, C bb) const {
    const C z = 0;
    return {{{aa, -n2 * g_minus, -n2 * gn_minus, z},
             {-n2 * g_plus, bb, z, -n2 * gn_minus},
             {-n2 * gn_plus, z, std::conj(bb), -n2 * g_minus},
             {z, -n2 * gn_plus, -n2 * g_plus, std::conj(aa)}}};
  }

  // Table of the closed-form inverse, divided by the given determinant.
  Mat4<Real> inverse_table(const MnCoefficients<Real>& q, Real det) const {
    const Real gm = g_minus, gp = g_plus, gnm = gn_minus, gnp = gn_plus;
    Mat4<Real> t = {{{q.d_plus, gm * q.d, gnm * std::conj(q.c), gm * gnm * q.c0},
                     {gp * q.d0, q.d_minus, gp * gnm * q.c0, gnm * q.c},
                     {gnp * std::conj(q.c), gm * gnp * q.c0, std::conj(q.d_minus), gm * std::conj(q.d0)},
                     {gp * gnp * q.c0, gnp * q.c, gp * std::conj(q.d), std::conj(q.d_plus)}}};
    for (auto& row : t)
      for (auto& x : row) x /= det;
    return t;
  }
};

template <class Real = double>
MnMatrix<Real> build_mn(Real lambda, std::int64_t eta, std::int64_t j, std::int64_t n, Real gamma) {
  require(lambda > 0, "lambda must be positive");
  require(gamma > 0, "gamma must be positive");
  require(n >= 1, "n must be at least 1");
  MnMatrix<Real> m;
  m.lambda = lambda;
  m.gamma = gamma;
  m.eta = eta;
  m.j = j;
  m.n = n;
  const Real nn = static_cast<Real>(n);
  const Real s1 = sin_pi_ratio<Real>(j + eta, n);  // sin(pi (k + eta/n))
  const Real s0 = sin_pi_ratio<Real>(j, n);        // sin(pi k)
  m.sin_k = sin_pi_ratio<Real>(2 * j, n);
  m.sin_kn = sin_pi_ratio<Real>(2 * (j + eta), n);
  // Product forms sin^2 A - sin^2 B = sin(A + B) sin(A - B) avoid cancellation.
  m.delta_s = 2 * nn * sin_pi_ratio<Real>(2 * j + eta, n) * sin_pi_ratio<Real>(eta, n);
  m.sigma_s = 2 * (s1 * s1 + s0 * s0);
  m.delta_gamma = nn * sin_pi_ratio<Real>(2 * (2 * j + eta), n) * sin_pi_ratio<Real>(2 * eta, n);
  m.big_gamma = nn * nn * (2 * m.sin_k * m.sin_k + 2 * m.sin_kn * m.sin_kn + m.sigma_s * m.sigma_s);
  m.g_plus = gamma + m.sin_k;
  m.g_minus = gamma - m.sin_k;
  m.gn_plus = gamma + m.sin_kn;
  m.gn_minus = gamma - m.sin_kn;
  const std::complex<Real> i(0, 1);
  m.a = lambda + i * nn * m.delta_s + 2 * gamma * nn * nn;
  m.b = lambda + i * nn * nn * m.sigma_s + 2 * gamma * nn * nn;
  return m;
}

// First-order brackets of the normalized coefficients, as displayed in the
// coefficient asymptotics, next to the complete first-order expansion
// obtained by keeping every O(1/n) term of a/n^2 = 2 gamma + i ds/n + O(n^-2)
// and b/n^2 = 2 gamma + i ss + O(n^-2).
template <class Real>
struct CoefficientBrackets {
  MnCoefficients<Real> stated;
  MnCoefficients<Real> full;
};

template <class Real>
CoefficientBrackets<Real> coefficient_brackets(const MnMatrix<Real>& m) {
  using C = std::complex<Real>;
  const C i(0, 1);
  const Real g = m.gamma, ss = m.sigma_s, ds = m.delta_s, nn = m.nr();
  const Real sk2 = m.sin_k * m.sin_k, skn2 = m.sin_kn * m.sin_kn;
  const Real dgn = m.delta_gamma / nn;  // sin^2(2 pi (k + eta/n)) - sin^2(2 pi k)
  CoefficientBrackets<Real> r;
  auto& s = r.stated;
  s.d_plus = 4 * g * g * g + 4 * g * sk2 + 2 * g * ss * ss - i * ds / nn * (4 * g * g + ss * ss);
  s.c = 4 * g * g - Real(2) * i * g * ss + skn2 - sk2 + ds * ss / nn;
  s.d = 4 * g * g - Real(2) * i * g * ss + sk2 - skn2 - Real(2) * i * g * ds / nn - ds * ss / nn;
  s.c0 = 4 * g;
  s.d0 = s.d;
  s.d_minus = 4 * g * g * g + 4 * g * sk2 - Real(4) * i * g * g * ss + 2 * g * (skn2 - sk2);
  auto& f = r.full;
  f.d_plus = s.d_plus + (2 * g - i * ss) * dgn;
  f.c = s.c + Real(2) * i * g * ds / nn;
  f.d = s.d;
  f.c0 = s.c0;
  f.d0 = s.d0;
  f.d_minus = s.d_minus;
  return r;
}

}  // namespace hydrochain
