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
#include <functional>
#include <optional>
#include <ostream>
#include <utility>

#include "hydrochain/chain.hpp"
#include "hydrochain/profile.hpp"

namespace hydrochain {

enum class Species : int { WPlus = 0, YPlus = 1, YMinus = 2, WMinus = 3 };

inline constexpr std::array<Species, 4> kAllSpecies = {Species::WPlus, Species::YPlus, Species::YMinus,
                                                       Species::WMinus};

inline const char* species_name(Species s) {
  switch (s) {
    case Species::WPlus: return "W+";
    case Species::YPlus: return "Y+";
    case Species::YMinus: return "Y-";
    case Species::WMinus: return "W-";
  }
  return "?";
}

// Wigner-type functions on (eta, k), |eta| <= M, k = j/n. For the plus
// species, with psi^ the Fourier transform of psi_x = r_x + i p_x,
//   W+(eta, k) = (2n)^-1 E[psi^(k + eta/n) conj(psi^(k))],
//   Y+(eta, k) = (2n)^-1 E[psi^(k + eta/n) psi^(-k)],
// with k + eta/n reduced mod 1. The minus species are the reflections
//   W-(eta, k) = conj W+(-eta, -k),  Y-(eta, k) = conj Y+(-eta, -k).
class WignerField {
 public:
  WignerField() = default;
  WignerField(std::size_t n, int eta_max) : n_(n), eta_max_(eta_max) {
    require(n >= 1 && eta_max >= 0, "invalid Wigner field shape");
    require(2 * static_cast<std::size_t>(eta_max) < n, "need 2 eta_max < n");
    const std::size_t cells = 4 * width() * n;
    values_.assign(cells, 0.0);
    se_re_.assign(cells, 0.0);
    se_im_.assign(cells, 0.0);
  }

  std::size_t n() const { return n_; }
  int eta_max() const { return eta_max_; }
  std::size_t width() const { return 2 * static_cast<std::size_t>(eta_max_) + 1; }
  std::size_t ensemble_count = 0;

  cplx& at(Species s, int eta, std::size_t j) { return values_[index(s, eta, j)]; }
  cplx at(Species s, int eta, std::size_t j) const { return values_[index(s, eta, j)]; }
  double& stderr_re(Species s, int eta, std::size_t j) { return se_re_[index(s, eta, j)]; }
  double& stderr_im(Species s, int eta, std::size_t j) { return se_im_[index(s, eta, j)]; }
  double stderr_re(Species s, int eta, std::size_t j) const { return se_re_[index(s, eta, j)]; }
  double stderr_im(Species s, int eta, std::size_t j) const { return se_im_[index(s, eta, j)]; }

  // [f(eta, .)]_n = n^-1 sum_k f(eta, k)
  cplx k_average(Species s, int eta) const {
    std::vector<cplx> v(n_);
    for (std::size_t j = 0; j < n_; ++j) v[j] = at(s, eta, j);
    return pairwise_sum(v) / static_cast<double>(n_);
  }

  // Fills the minus species from the plus species by reflection.
  void reflect_minus_species() {
    for (int eta = -eta_max_; eta <= eta_max_; ++eta) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t jr = (n_ - j) % n_;
        at(Species::WMinus, eta, j) = std::conj(at(Species::WPlus, -eta, jr));
        at(Species::YMinus, eta, j) = std::conj(at(Species::YPlus, -eta, jr));
        stderr_re(Species::WMinus, eta, j) = stderr_re(Species::WPlus, -eta, jr);
        stderr_im(Species::WMinus, eta, j) = stderr_im(Species::WPlus, -eta, jr);
        stderr_re(Species::YMinus, eta, j) = stderr_re(Species::YPlus, -eta, jr);
        stderr_im(Species::YMinus, eta, j) = stderr_im(Species::YPlus, -eta, jr);
      }
    }
  }

  // Linear combination a*this + b*o on identical shapes (standard errors are
  // not propagated).
  WignerField combine(double a, const WignerField& o, double b) const {
    require(o.n_ == n_ && o.eta_max_ == eta_max_, "Wigner field shapes differ");
    WignerField r(n_, eta_max_);
    for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = a * values_[i] + b * o.values_[i];
    r.ensemble_count = ensemble_count;
    return r;
  }

  // CSV rows: species,eta,k_index,re,im,stderr_re,stderr_im (a leading
  // lambda column when given).
  void write_csv(std::ostream& os, std::optional<double> lambda = std::nullopt, bool header = true) const {
    if (header) os << (lambda ? "lambda," : "") << "species,eta,k_index,re,im,stderr_re,stderr_im\n";
    for (Species s : kAllSpecies) {
      for (int eta = -eta_max_; eta <= eta_max_; ++eta) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (lambda) os << *lambda << ',';
          const cplx v = at(s, eta, j);
          os << species_name(s) << ',' << eta << ',' << j << ',' << v.real() << ',' << v.imag() << ','
             << stderr_re(s, eta, j) << ',' << stderr_im(s, eta, j) << '\n';
        }
      }
    }
  }

 private:
  std::size_t index(Species s, int eta, std::size_t j) const {
    require(eta >= -eta_max_ && eta <= eta_max_ && j < n_, "Wigner index out of range");
    return (static_cast<std::size_t>(s) * width() + static_cast<std::size_t>(eta + eta_max_)) * n_ + j;
  }

  std::size_t n_ = 0;
  int eta_max_ = 0;
  std::vector<cplx> values_;
  std::vector<double> se_re_, se_im_;
};

// Per-sample products entering W+ and Y+ for one wave spectrum.
template <class F>
void for_each_wigner_product(std::span<const cplx> psi_hat, int eta_max, F&& f) {
  const std::size_t n = psi_hat.size();
  const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
  const auto ni = static_cast<std::int64_t>(n);
  for (int eta = -eta_max; eta <= eta_max; ++eta) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx a = psi_hat[static_cast<std::size_t>(wrap_index(static_cast<std::int64_t>(j) + eta, ni))];
      const cplx w = inv2n * a * std::conj(psi_hat[j]);
      const cplx y = inv2n * a * psi_hat[(n - j) % n];
      f(eta, j, w, y);
    }
  }
}

// Mergeable ensemble accumulator for W+ and Y+.
class WignerAccumulator {
 public:
  WignerAccumulator(std::size_t n, int eta_max) : n_(n), eta_max_(eta_max) {
    require(2 * static_cast<std::size_t>(eta_max) < n, "need 2 eta_max < n");
    w_.resize((2 * static_cast<std::size_t>(eta_max) + 1) * n);
    y_.resize(w_.size());
  }

  void add(std::span<const cplx> psi_hat) {
    require(psi_hat.size() == n_, "sample size does not match accumulator");
    for_each_wigner_product(psi_hat, eta_max_, [&](int eta, std::size_t j, cplx w, cplx y) {
      const std::size_t i = static_cast<std::size_t>(eta + eta_max_) * n_ + j;
      w_[i].add(w);
      y_[i].add(y);
    });
    ++count_;
  }

  void merge(const WignerAccumulator& o) {
    require(o.n_ == n_ && o.eta_max_ == eta_max_, "accumulator shapes differ");
    for (std::size_t i = 0; i < w_.size(); ++i) {
      w_[i].merge(o.w_[i]);
      y_[i].merge(o.y_[i]);
    }
    count_ += o.count_;
  }

  std::size_t count() const { return count_; }

  WignerField finalize() const {
    WignerField f(n_, eta_max_);
    f.ensemble_count = count_;
    for (int eta = -eta_max_; eta <= eta_max_; ++eta) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t i = static_cast<std::size_t>(eta + eta_max_) * n_ + j;
        f.at(Species::WPlus, eta, j) = w_[i].mean();
        f.at(Species::YPlus, eta, j) = y_[i].mean();
        f.stderr_re(Species::WPlus, eta, j) = w_[i].stderr_re();
        f.stderr_im(Species::WPlus, eta, j) = w_[i].stderr_im();
        f.stderr_re(Species::YPlus, eta, j) = y_[i].stderr_re();
        f.stderr_im(Species::YPlus, eta, j) = y_[i].stderr_im();
      }
    }
    f.reflect_minus_species();
    return f;
  }

 private:
  std::size_t n_;
  int eta_max_;
  std::vector<ComplexStats> w_, y_;
  std::size_t count_ = 0;
};

inline WignerField wigner_estimate(std::span<const ChainState> ens, int eta_max) {
  require(!ens.empty(), "empty ensemble");
  const std::size_t n = ens[0].size();
  for (const auto& s : ens) {
    require(s.size() == n, "ensemble members differ in size");
    require(s.t == ens[0].t, "ensemble members are at different times");
  }
  require(eta_max >= 0 && 2 * static_cast<std::size_t>(eta_max) < n, "eta_max too large for n");
  WignerAccumulator acc(n, eta_max);
  for (const auto& s : ens) acc.add(wave_function_hat(s));
  return acc.finalize();
}

// Wigner field of a single (deterministic) wave spectrum.
inline WignerField wigner_of_wave(std::span<const cplx> psi_hat, int eta_max) {
  WignerAccumulator acc(psi_hat.size(), eta_max);
  acc.add(psi_hat);
  return acc.finalize();
}

// Test function G(u, v) through its Fourier coefficients in u,
// FG(eta, v) = int G(u, v) exp(-2 pi i eta u) du, supported on |eta| <= eta_max.
struct TestFunction {
  int eta_max = 0;
  std::function<cplx(int, double)> fourier;

  // G(u, v) = g(u) h(v) for a profile g.
  static TestFunction separable(const MacroProfile& g, std::function<double(double)> h = nullptr) {
    TestFunction t;
    t.eta_max = g.degree();
    t.fourier = [g, h](int eta, double v) { return g.coefficient(eta) * (h ? h(v) : 1.0); };
    return t;
  }

  // G(u, v) = exp(2 pi i eta0 u) h(v).
  static TestFunction single_mode(int eta0, std::function<double(double)> h = nullptr) {
    TestFunction t;
    t.eta_max = eta0 < 0 ? -eta0 : eta0;
    t.fourier = [eta0, h](int eta, double v) { return eta == eta0 ? cplx(h ? h(v) : 1.0) : cplx(0.0); };
    return t;
  }
};

// <W+, G> = n^-1 sum_k sum_eta W+(eta, k) conj(FG(eta, k)).
inline cplx pair_with_test_function(const WignerField& f, const TestFunction& g,
                                    Species s = Species::WPlus) {
  require(g.eta_max <= f.eta_max(), "test function exceeds the eta range of the field");
  const std::size_t n = f.n();
  std::vector<cplx> terms;
  terms.reserve(f.width() * n);
  for (int eta = -g.eta_max; eta <= g.eta_max; ++eta) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = static_cast<double>(j) / static_cast<double>(n);
      terms.push_back(f.at(s, eta, j) * std::conj(g.fourier(eta, v)));
    }
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

// n^-1 avg E^(eta/n), the Fourier transform of the site energies.
inline cplx energy_fourier(std::span<const ChainState> ens, int eta) {
  require(!ens.empty(), "empty ensemble");
  const std::size_t n = ens[0].size();
  const auto ni = static_cast<std::int64_t>(n);
  std::vector<cplx> terms;
  terms.reserve(n * ens.size());
  for (const auto& s : ens) {
    const auto e = energy_per_site(s);
    for (std::size_t x = 0; x < n; ++x) terms.push_back(e[x] * unit_root(static_cast<std::int64_t>(x) * eta, ni));
  }
  return pairwise_sum(terms) / (static_cast<double>(n) * static_cast<double>(ens.size()));
}

// W = Wbar + Wtilde where Wbar is built from the ensemble-mean wave and
// Wtilde = W - Wbar (the 1/M sample covariance of the wave spectrum).
inline std::pair<WignerField, WignerField> mean_fluct_decompose(std::span<const ChainState> ens, int eta_max) {
  require(ens.size() >= 2, "decomposition needs at least two samples");
  const WignerField full = wigner_estimate(ens, eta_max);
  const std::size_t n = ens[0].size();
  std::vector<cplx> mean(n, 0.0);
  for (const auto& s : ens) {
    const auto h = wave_function_hat(s);
    for (std::size_t j = 0; j < n; ++j) mean[j] += h[j];
  }
  for (auto& z : mean) z /= static_cast<double>(ens.size());
  WignerField bar = wigner_of_wave(mean, eta_max);
  bar.ensemble_count = ens.size();
  WignerField tilde = full.combine(1.0, bar, -1.0);
  return {std::move(bar), std::move(tilde)};
}

// W(r; eta, xi) = (Fr)(xi + eta) conj((Fr)(xi)) / 2 on the continuous torus.
inline cplx macro_wigner(const MacroProfile& r, int eta, int xi) {
  return 0.5 * r.coefficient(xi + eta) * std::conj(r.coefficient(xi));
}

// Discrete counterpart W_n(r; eta, k) = (2n)^-1 (F_n r)(k + eta/n) conj((F_n r)(k)),
// F_n r(k) = sum_x r(x/n) exp(-2 pi i x k). All four species coincide.
inline WignerField discrete_profile_wigner(const MacroProfile& r, std::size_t n, int eta_max) {
  const auto samples = r.sample(n);
  const auto fr = dft(std::span<const double>(samples));
  return wigner_of_wave(fr, eta_max);
}

}  // namespace hydrochain
