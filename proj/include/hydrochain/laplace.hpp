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

#include "hydrochain/profile.hpp"
#include "hydrochain/wigner.hpp"

namespace hydrochain {

// Quadrature weights for int_0^T exp(-lambda t) f(t) dt on a grid t_0 = 0 <
// ... < t_N = T, exact for f piecewise linear between grid points (an
// exponentially weighted trapezoid rule). On [t_i, t_i + h] with a = lambda h,
//   int exp(-lambda t) f = exp(-lambda t_i) h [f_i (phi1 - phi2) + f_{i+1} phi2],
//   phi1(a) = (1 - e^-a)/a,  phi2(a) = (1 - e^-a (1 + a))/a^2.
inline double laplace_phi1(double a) {
  if (a < 1e-2) {
    double s = 0.0, term = 1.0;
    for (int m = 0; m < 10; ++m) {
      s += term / (m + 1);
      term *= -a / (m + 1);
    }
    return s;
  }
  return -std::expm1(-a) / a;
}

inline double laplace_phi2(double a) {
  if (a < 1e-2) {
    // sum_m (-a)^m / (m! (m + 2))
    double s = 0.0, term = 1.0;
    for (int m = 0; m < 10; ++m) {
      s += term / (m + 2);
      term *= -a / (m + 1);
    }
    return s;
  }
  return (-std::expm1(-a) - a * std::exp(-a)) / (a * a);
}

inline std::vector<double> laplace_weights(std::span<const double> grid, double lambda) {
  require(lambda > 0.0, "lambda must be positive");
  require(grid.size() >= 2, "Laplace grid needs at least two points");
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    require(h > 0.0, "Laplace grid must be strictly increasing");
    const double a = lambda * h;
    const double e = std::exp(-lambda * grid[i]);
    const double p2 = laplace_phi2(a);
    w[i] += e * h * (laplace_phi1(a) - p2);
    w[i + 1] += e * h * p2;
  }
  return w;
}

// Uniform grid 0, h, ..., T with N intervals.
inline std::vector<double> uniform_grid(double horizon, std::size_t intervals) {
  require(horizon > 0.0 && intervals >= 1, "invalid uniform grid");
  std::vector<double> g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) g[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
  g.back() = horizon;
  return g;
}

// Default grid: spacing min(1/(20 lambda_max), T/2000), with an even number of
// intervals so the half-resolution error estimate is available.
inline std::vector<double> default_laplace_grid(double horizon, double lambda_max) {
  require(horizon > 0.0 && lambda_max > 0.0, "invalid Laplace grid request");
  const double h = std::min(1.0 / (20.0 * lambda_max), horizon / 2000.0);
  auto intervals = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  if (intervals % 2) ++intervals;
  return uniform_grid(horizon, intervals);
}

// Weights for a set of lambdas on one grid, at full and at half resolution
// (every other point; needs an even interval count) for error estimates.
class LaplaceQuadrature {
 public:
  LaplaceQuadrature(std::vector<double> grid, std::vector<double> lambdas)
      : grid_(std::move(grid)), lambdas_(std::move(lambdas)) {
    require(grid_.size() >= 3, "Laplace grid needs at least two intervals");
    require(grid_.front() == 0.0, "Laplace grid must start at t = 0");
    require(!lambdas_.empty(), "need at least one lambda");
    const double lmin = *std::min_element(lambdas_.begin(), lambdas_.end());
    require(lmin > 0.0, "lambda must be positive");
    require(grid_.back() * lmin >= 8.0 - 1e-12, "horizon shorter than 8 / lambda_min");
    std::vector<double> coarse;
    if ((grid_.size() - 1) % 2 == 0) {
      for (std::size_t i = 0; i < grid_.size(); i += 2) coarse.push_back(grid_[i]);
    }
    for (double l : lambdas_) {
      fine_.push_back(laplace_weights(grid_, l));
      std::vector<double> c(grid_.size(), 0.0);
      if (!coarse.empty()) {
        const auto wc = laplace_weights(coarse, l);
        for (std::size_t i = 0; i < wc.size(); ++i) c[2 * i] = wc[i];
      }
      coarse_.push_back(std::move(c));
    }
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double horizon() const { return grid_.back(); }
  bool has_error_estimate() const { return (grid_.size() - 1) % 2 == 0; }
  const std::vector<double>& weights(std::size_t li) const { return fine_[li]; }
  const std::vector<double>& coarse_weights(std::size_t li) const { return coarse_[li]; }
  // sup|f| exp(-lambda T) / lambda bounds the neglected tail.
  double tail_factor(std::size_t li) const { return std::exp(-lambdas_[li] * horizon()) / lambdas_[li]; }

 private:
  std::vector<double> grid_;
  std::vector<double> lambdas_;
  std::vector<std::vector<double>> fine_, coarse_;
};

// Laplace transforms of a Wigner time series, one field per lambda.
struct LaplaceWignerField {
  std::vector<double> lambdas;
  std::vector<WignerField> fields;
  std::vector<double> t_grid;
  double horizon = 0.0;
  std::vector<double> tail_bound;       // per lambda, sup_t,cells |W| exp(-lambda T)/lambda
  std::vector<double> quadrature_error;  // per lambda, max over cells of |I_h - I_2h| / 3

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < lambdas.size(); ++i) fields[i].write_csv(os, lambdas[i], i == 0);
  }
};

// Post-hoc quadrature of a saved time series. Standard errors of the result
// are the fully correlated bound sum_i w_i stderr_i.
inline LaplaceWignerField laplace_accumulate(std::span<const WignerField> series, std::span<const double> t_grid,
                                             std::span<const double> lambdas) {
  require(series.size() == t_grid.size(), "series and grid lengths differ");
  for (double l : lambdas) require(l > 0.0, "lambda must be positive");
  LaplaceQuadrature quad(std::vector<double>(t_grid.begin(), t_grid.end()),
                         std::vector<double>(lambdas.begin(), lambdas.end()));
  const std::size_t n = series[0].n();
  const int m = series[0].eta_max();
  for (const auto& f : series) require(f.n() == n && f.eta_max() == m, "series fields differ in shape");
  double sup = 0.0;
  for (const auto& f : series)
    for (Species s : kAllSpecies)
      for (int eta = -m; eta <= m; ++eta)
        for (std::size_t j = 0; j < n; ++j) sup = std::max(sup, std::abs(f.at(s, eta, j)));
  LaplaceWignerField out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  out.t_grid = quad.grid();
  out.horizon = quad.horizon();
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const auto& w = quad.weights(li);
    const auto& wc = quad.coarse_weights(li);
    WignerField f(n, m);
    f.ensemble_count = series[0].ensemble_count;
    double qerr = 0.0;
    for (Species s : kAllSpecies) {
      for (int eta = -m; eta <= m; ++eta) {
        for (std::size_t j = 0; j < n; ++j) {
          cplx acc = 0.0, acc_c = 0.0;
          double se_r = 0.0, se_i = 0.0;
          for (std::size_t i = 0; i < series.size(); ++i) {
            const cplx v = series[i].at(s, eta, j);
            acc += w[i] * v;
            acc_c += wc[i] * v;
            se_r += w[i] * series[i].stderr_re(s, eta, j);
            se_i += w[i] * series[i].stderr_im(s, eta, j);
          }
          f.at(s, eta, j) = acc;
          f.stderr_re(s, eta, j) = se_r;
          f.stderr_im(s, eta, j) = se_i;
          if (quad.has_error_estimate()) qerr = std::max(qerr, std::abs(acc - acc_c) / 3.0);
        }
      }
    }
    out.fields.push_back(std::move(f));
    out.tail_bound.push_back(sup * quad.tail_factor(li));
    out.quadrature_error.push_back(qerr);
  }
  return out;
}

// Laplace transform of the mechanical Wigner function of the macroscopic
// elongation, whose modes decay as exp(-2 pi^2 [xi^2 + (eta+xi)^2] t / gamma):
//   w(r0; eta, xi)(lambda) = W(r0; eta, xi) / (2 pi^2 gamma^-1 [xi^2 + (eta+xi)^2] + lambda).
inline cplx laplace_macro(const MacroProfile& r0, double gamma, double lambda, int eta, int xi) {
  require(lambda > 0.0, "lambda must be positive");
  require(gamma > 0.0, "gamma must be positive");
  const double q = static_cast<double>(xi) * xi + static_cast<double>(eta + xi) * (eta + xi);
  return macro_wigner(r0, eta, xi) / (2.0 * kPi * kPi * q / gamma + lambda);
}

// Half the Laplace transform of F((d_u r_t)^2)(eta):
//   4 pi^2 sum_xi (eta + xi) xi w(r0; eta, xi)(lambda).
inline cplx dissipation_laplace(const MacroProfile& r0, double gamma, double lambda, int eta) {
  const int m = r0.degree();
  cplx s = 0.0;
  for (int xi = -m; xi <= m; ++xi) {
    if (std::abs(xi + eta) > m) continue;
    s += static_cast<double>(eta + xi) * xi * laplace_macro(r0, gamma, lambda, eta, xi);
  }
  return 4.0 * kPi * kPi * s;
}

struct LaplaceTargets {
  cplx mech;     // sum_xi w(r0; eta, xi)(lambda)
  cplx thermal;  // (lambda + eta^2 pi^2/gamma)^-1 {F e_thm0(eta) + (2 gamma)^-1 L[F((d_u r)^2)(eta)](lambda)}
};

inline LaplaceTargets mech_thermal_laplace_targets(const MacroProfile& r0, const MacroProfile& ethm0, double gamma,
                                                   double lambda, int eta) {
  require(lambda > 0.0, "lambda must be positive");
  LaplaceTargets t;
  const int m = r0.degree();
  t.mech = 0.0;
  for (int xi = -m; xi <= m; ++xi) t.mech += laplace_macro(r0, gamma, lambda, eta, xi);
  const cplx source = 2.0 * dissipation_laplace(r0, gamma, lambda, eta);
  t.thermal = (ethm0.coefficient(eta) + source / (2.0 * gamma)) / (lambda + eta * eta * kPi * kPi / gamma);
  return t;
}

}  // namespace hydrochain
