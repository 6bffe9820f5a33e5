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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hydrochain/profile.hpp"

namespace hydrochain {

// Fourier coefficients c_eta, |eta| <= N, of a real field on the torus.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int n_modes) : n_modes_(n_modes), c_(2 * static_cast<std::size_t>(n_modes) + 1, 0.0) {
    require(n_modes >= 0, "mode count must be nonnegative");
  }

  static SpectralField from_profile(const MacroProfile& p, int n_modes) {
    require(p.degree() <= n_modes, "profile degree exceeds the spectral truncation");
    SpectralField f(n_modes);
    for (int eta = -n_modes; eta <= n_modes; ++eta) f[eta] = p.coefficient(eta);
    return f;
  }

  int n_modes() const { return n_modes_; }
  cplx& operator[](int eta) { return c_[static_cast<std::size_t>(eta + n_modes_)]; }
  cplx operator[](int eta) const { return c_[static_cast<std::size_t>(eta + n_modes_)]; }
  // Zero outside the stored range.
  cplx at(int eta) const { return (eta < -n_modes_ || eta > n_modes_) ? cplx(0.0) : (*this)[eta]; }

  double eval(double u) const {
    double v = (*this)[0].real();
    for (int eta = 1; eta <= n_modes_; ++eta) {
      const double a = kTwoPi * eta * u;
      const cplx c = (*this)[eta];
      v += 2.0 * (c.real() * std::cos(a) - c.imag() * std::sin(a));
    }
    return v;
  }

  // Coefficients of f * g, truncated to this field's range.
  SpectralField times(const SpectralField& g) const {
    SpectralField out(n_modes_);
    for (int eta = -n_modes_; eta <= n_modes_; ++eta) {
      cplx s = 0.0;
      for (int xi = -n_modes_; xi <= n_modes_; ++xi) s += (*this)[xi] * g.at(eta - xi);
      out[eta] = s;
    }
    return out;
  }

  SpectralField derivative() const {
    SpectralField out(n_modes_);
    for (int eta = -n_modes_; eta <= n_modes_; ++eta) out[eta] = cplx(0.0, kTwoPi * eta) * (*this)[eta];
    return out;
  }

  SpectralField plus(const SpectralField& g, double scale = 1.0) const {
    SpectralField out(n_modes_);
    for (int eta = -n_modes_; eta <= n_modes_; ++eta) out[eta] = (*this)[eta] + scale * g.at(eta);
    return out;
  }

 private:
  int n_modes_;
  std::vector<cplx> c_;
};

struct MacroState {
  double t = 0.0;
  double gamma = 1.0;
  SpectralField r_hat;
  SpectralField ethm_hat;
};

// Diffusion rate of mode eta of the elongation: (2 pi eta)^2 / (2 gamma).
inline double elongation_rate(int eta, double gamma) { return 4.0 * kPi * kPi * eta * eta / (2.0 * gamma); }

// Diffusion rate of mode eta of the thermal energy: (2 pi eta)^2 / (4 gamma).
inline double thermal_rate(int eta, double gamma) { return 4.0 * kPi * kPi * eta * eta / (4.0 * gamma); }

// r^(t, eta) = exp(-(2 pi eta)^2 t / (2 gamma)) r^(0, eta).
inline SpectralField solve_elongation(const SpectralField& r0, double gamma, double t) {
  require(t >= 0.0, "time must be nonnegative");
  require(gamma > 0.0, "gamma must be positive");
  SpectralField out(r0.n_modes());
  for (int eta = -r0.n_modes(); eta <= r0.n_modes(); ++eta) out[eta] = std::exp(-elongation_rate(eta, gamma) * t) * r0[eta];
  return out;
}

// F((d_u r)^2), the autoconvolution of {2 pi i eta r^(eta)}.
inline SpectralField grad_r_squared_fourier(const SpectralField& r) {
  const SpectralField d = r.derivative();
  return d.times(d);
}

// Thermal energy equation with mechanical dissipation as source:
//   e^_thm(t, eta) = exp(-D t) e^_thm(0, eta)
//                    + (2 gamma)^-1 int_0^t exp(-D (t - s)) F((d_u r_s)^2)(eta) ds,
// D = (2 pi eta)^2 / (4 gamma). The time integral uses adaptive Gauss-Kronrod
// quadrature; the integrand is a finite sum of decaying exponentials.
class MacroPdeSolver {
 public:
  MacroPdeSolver(const MacroProfile& r0, const MacroProfile& ethm0, double gamma, int n_modes = 64,
                 double rel_tol = 1e-9)
      : gamma_(gamma), n_modes_(n_modes), rel_tol_(rel_tol) {
    require(gamma > 0.0, "gamma must be positive");
    require(n_modes >= 2 * r0.degree() + 2, "n_modes must be at least 2 M + 2 for the elongation degree M");
    require(ethm0.degree() <= n_modes, "thermal profile degree exceeds n_modes");
    require(ethm0.min_on_grid(4096) > 0.0, "initial thermal energy must be positive");
    r0_ = SpectralField::from_profile(r0, n_modes);
    ethm0_ = SpectralField::from_profile(ethm0, n_modes);
    r_degree_ = r0.degree();
  }

  double gamma() const { return gamma_; }
  int n_modes() const { return n_modes_; }

  SpectralField elongation(double t) const { return solve_elongation(r0_, gamma_, t); }

  // F((d_u r_s)^2)(eta)
  cplx source(double s, int eta) const {
    cplx acc = 0.0;
    for (int xi = -r_degree_; xi <= r_degree_; ++xi) {
      const int z = eta - xi;
      if (z < -r_degree_ || z > r_degree_) continue;
      const double decay = std::exp(-(elongation_rate(xi, gamma_) + elongation_rate(z, gamma_)) * s);
      acc += -4.0 * kPi * kPi * static_cast<double>(xi) * z * r0_[xi] * r0_[z] * decay;
    }
    return acc;
  }

  SpectralField thermal(double t) const {
    require(t >= 0.0, "time must be nonnegative");
    SpectralField out(n_modes_);
    using boost::math::quadrature::gauss_kronrod;
    for (int eta = -n_modes_; eta <= n_modes_; ++eta) {
      const double d = thermal_rate(eta, gamma_);
      cplx integral = 0.0;
      if (std::abs(eta) <= 2 * r_degree_ && t > 0.0) {
        auto re = [&](double s) { return std::exp(-d * (t - s)) * source(s, eta).real(); };
        auto im = [&](double s) { return std::exp(-d * (t - s)) * source(s, eta).imag(); };
        const double a = gauss_kronrod<double, 61>::integrate(re, 0.0, t, 20, rel_tol_ * 1e-3);
        const double b = gauss_kronrod<double, 61>::integrate(im, 0.0, t, 20, rel_tol_ * 1e-3);
        integral = {a, b};
      }
      out[eta] = std::exp(-d * t) * ethm0_[eta] + integral / (2.0 * gamma_);
    }
    return out;
  }

  MacroState state(double t) const { return {t, gamma_, elongation(t), thermal(t)}; }

 private:
  double gamma_;
  int n_modes_;
  double rel_tol_;
  int r_degree_ = 0;
  SpectralField r0_, ethm0_;
};

struct EnergyProfiles {
  SpectralField e_mech;  // r^2 / 2
  SpectralField e;       // e_mech + e_thm
};

inline EnergyProfiles total_energy_profile(const MacroState& s) {
  EnergyProfiles p;
  p.e_mech = s.r_hat.times(s.r_hat);
  for (int eta = -p.e_mech.n_modes(); eta <= p.e_mech.n_modes(); ++eta) p.e_mech[eta] *= 0.5;
  p.e = p.e_mech.plus(s.ethm_hat);
  return p;
}

// int log e_thm(t, u) du as the mean over a uniform periodic grid.
inline double entropy_functional(const MacroState& s, std::size_t grid_points = 2048) {
  require(grid_points >= 1, "entropy grid needs at least one point");
  std::vector<double> v(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double e = s.ethm_hat.eval(static_cast<double>(i) / static_cast<double>(grid_points));
    require(e > 0.0, "nonpositive thermal energy on the entropy grid");
    v[i] = std::log(e);
  }
  return pairwise_sum(v) / static_cast<double>(grid_points);
}

// Residual of d/dt e_mech = (2 gamma)^-1 (d_uu e_mech - (d_u r)^2) at time t,
// with the time derivative from a five-point central difference of step h.
// Returns max over modes of |residual| divided by max |d/dt e_mech^|.
inline double mechanical_energy_residual(const MacroPdeSolver& sol, double t, double h) {
  require(t - 2.0 * h >= 0.0, "finite difference stencil leaves t >= 0");
  auto emech = [&](double s) {
    const SpectralField r = sol.elongation(s);
    SpectralField e = r.times(r);
    for (int eta = -e.n_modes(); eta <= e.n_modes(); ++eta) e[eta] *= 0.5;
    return e;
  };
  const SpectralField em2 = emech(t - 2 * h), em1 = emech(t - h), ep1 = emech(t + h), ep2 = emech(t + 2 * h);
  const SpectralField e0 = emech(t);
  const SpectralField g = grad_r_squared_fourier(sol.elongation(t));
  double worst = 0.0, scale = 0.0;
  for (int eta = -e0.n_modes(); eta <= e0.n_modes(); ++eta) {
    const cplx dt = (em2[eta] - 8.0 * em1[eta] + 8.0 * ep1[eta] - ep2[eta]) / (12.0 * h);
    const cplx rhs = (-4.0 * kPi * kPi * eta * eta * e0[eta] - g[eta]) / (2.0 * sol.gamma());
    worst = std::max(worst, std::abs(dt - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace hydrochain
