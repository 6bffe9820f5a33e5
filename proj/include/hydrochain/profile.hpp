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
#include <sstream>

#include "hydrochain/common.hpp"

namespace hydrochain {

// Real periodic profile on the unit torus given by a finite Fourier series
//   f(u) = sum_{|eta| <= M} c_eta exp(2 pi i eta u),  c_{-eta} = conj(c_eta).
// Only c_0..c_M are stored.
class MacroProfile {
 public:
  MacroProfile() : coeffs_(1, cplx(0.0)) {}

  // Coefficients c_0, ..., c_M; c_0 must be real.
  static MacroProfile from_coefficients(std::vector<cplx> c) {
    require(!c.empty(), "profile needs at least the mean coefficient");
    require(std::abs(c[0].imag()) <= 1e-14 * (1.0 + std::abs(c[0].real())),
            "mean coefficient of a real profile must be real");
    c[0] = c[0].real();
    MacroProfile p;
    p.coeffs_ = std::move(c);
    p.trim();
    return p;
  }

  static MacroProfile constant(double value) { return from_coefficients({cplx(value)}); }

  // mean + amplitude cos(2 pi mode u)
  static MacroProfile cosine(double mean, double amplitude, int mode) {
    require(mode >= 0, "cosine mode must be nonnegative");
    if (mode == 0) return constant(mean + amplitude);
    std::vector<cplx> c(static_cast<std::size_t>(mode) + 1, cplx(0.0));
    c[0] = mean;
    c[static_cast<std::size_t>(mode)] = 0.5 * amplitude;
    return from_coefficients(std::move(c));
  }

  // Value `high` on [1/4, 3/4) and `low` elsewhere, truncated to `terms`
  // modes with Lanczos sigma factors to damp the Gibbs oscillation.
  static MacroProfile smoothed_step(double low, double high, int terms) {
    require(terms >= 1, "step profile needs at least one mode");
    std::vector<cplx> c(static_cast<std::size_t>(terms) + 1, cplx(0.0));
    c[0] = low + 0.5 * (high - low);
    for (int eta = 1; eta <= terms; ++eta) {
      const double x = kPi * eta / 2.0;
      const double ind = std::sin(x) / (kPi * eta) * ((eta % 2 == 0) ? 1.0 : -1.0);
      const double z = kPi * eta / (terms + 1.0);
      const double sigma = std::sin(z) / z;
      c[static_cast<std::size_t>(eta)] = (high - low) * ind * sigma;
    }
    return from_coefficients(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  // Fourier coefficient (F f)(eta) = int f(u) exp(-2 pi i eta u) du.
  cplx coefficient(int eta) const {
    const auto a = static_cast<std::size_t>(eta < 0 ? -eta : eta);
    if (a >= coeffs_.size()) return 0.0;
    return eta < 0 ? std::conj(coeffs_[a]) : coeffs_[a];
  }

  const std::vector<cplx>& coefficients() const { return coeffs_; }

  double eval(double u) const {
    double v = coeffs_[0].real();
    for (std::size_t eta = 1; eta < coeffs_.size(); ++eta) {
      const double a = kTwoPi * static_cast<double>(eta) * u;
      v += 2.0 * (coeffs_[eta].real() * std::cos(a) - coeffs_[eta].imag() * std::sin(a));
    }
    return v;
  }

  // Values f(x / n), x = 0..n-1.
  std::vector<double> sample(std::size_t n) const {
    std::vector<double> v(n);
    for (std::size_t x = 0; x < n; ++x) v[x] = eval(static_cast<double>(x) / static_cast<double>(n));
    return v;
  }

  double min_on_grid(std::size_t points) const {
    double m = eval(0.0);
    for (std::size_t i = 1; i < points; ++i) m = std::min(m, eval(static_cast<double>(i) / static_cast<double>(points)));
    return m;
  }

  // Pointwise product; coefficients are the discrete convolution.
  MacroProfile times(const MacroProfile& o) const {
    const int d = degree() + o.degree();
    std::vector<cplx> c(static_cast<std::size_t>(d) + 1, cplx(0.0));
    for (int eta = 0; eta <= d; ++eta) {
      cplx s = 0.0;
      for (int xi = -degree(); xi <= degree(); ++xi) s += coefficient(xi) * o.coefficient(eta - xi);
      c[static_cast<std::size_t>(eta)] = s;
    }
    c[0] = c[0].real();
    return from_coefficients(std::move(c));
  }

  MacroProfile plus(const MacroProfile& o, double scale = 1.0) const {
    std::vector<cplx> c(static_cast<std::size_t>(std::max(degree(), o.degree())) + 1, cplx(0.0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coefficient(static_cast<int>(i)) + scale * o.coefficient(static_cast<int>(i));
    return from_coefficients(std::move(c));
  }

  MacroProfile scaled(double s) const {
    std::vector<cplx> c = coeffs_;
    for (auto& z : c) z *= s;
    return from_coefficients(std::move(c));
  }

  std::string describe() const {
    std::ostringstream os;
    os << "fourier[";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) os << ", ";
      os << coeffs_[i].real();
      if (coeffs_[i].imag() != 0.0) os << (coeffs_[i].imag() < 0 ? "-" : "+") << std::abs(coeffs_[i].imag()) << "i";
    }
    os << "]";
    return os.str();
  }

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
  }

  std::vector<cplx> coeffs_;
};

}  // namespace hydrochain
