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

#include <cstdint>

#include "hydrochain/chain.hpp"
#include "hydrochain/rng.hpp"

namespace hydrochain {

// Event-driven sampler for the velocity-flip chain. Between flips every
// Fourier mode rotates exactly; flips are rank-one updates of the spectrum.
//
// Internal coordinates: the DC pair (r^(0), p^(0)) is kept as two reals and
// every other mode j as y_j = exp(-i phi_j) r^(j) + i p^(j), which obeys
// y_j' = -i omega_j y_j. Modes j and n - j share omega_j and are stored side
// by side ("a" and "b" arrays, index j - 1 for 1 <= j < n/2); for even n the
// mode n/2 is kept apart. Each flip is applied lazily during the rotation
// pass of the next event, so an event costs a single sweep over the modes.
class FlipChainSimulator {
 public:
  FlipChainSimulator(std::size_t n, double gamma) : n_(n), gamma_(gamma) {
    require(n >= 1, "simulator needs n >= 1");
    require(gamma > 0.0, "gamma must be positive");
    const double nd = static_cast<double>(n);
    rate_ = gamma * nd * nd * nd;
    half_ = (n - 1) / 2;
    has_middle_ = n % 2 == 0 && n >= 2;
    const auto ni = static_cast<std::int64_t>(n);
    omega_.resize(half_);
    for (std::size_t j = 1; j <= half_; ++j) omega_[j - 1] = ModeRotation::of(j, n).omega;
    omega_mid_ = has_middle_ ? ModeRotation::of(n / 2, n).omega : 0.0;
    omega_max_ = 2.0 * nd * nd;
    phase_.resize(n);
    sin_tab_.resize(n);
    cos_tab_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      phase_[j] = ModeRotation::of(j, n).phase;
      const auto ji = static_cast<std::int64_t>(j);
      sin_tab_[j] = sin_pi_ratio(2 * ji, ni);
      cos_tab_[j] = cos_pi_ratio(2 * ji, ni);
    }
    has_rows_ = n <= kMaxRowTable;
    if (has_rows_) {
      row_sin_.resize(n * half_);
      row_cos_.resize(n * half_);
      for (std::size_t x = 0; x < n; ++x) fill_row(x, row_sin_.data() + x * half_, row_cos_.data() + x * half_);
    } else {
      scratch_sin_.resize(2 * half_);
      scratch_cos_.resize(2 * half_);
    }
    zero_row_.assign(half_, 0.0);
    ar_.assign(half_, 0.0);
    ai_.assign(half_, 0.0);
    br_.assign(half_, 0.0);
    bi_.assign(half_, 0.0);
  }

  std::size_t size() const { return n_; }
  double gamma() const { return gamma_; }
  double time() const { return t_; }
  // Total flip rate gamma n^3 in macroscopic time.
  double event_rate() const { return rate_; }
  std::uint64_t events() const { return events_; }

  void load(const ChainState& s) {
    require(s.size() == n_, "state size does not match simulator");
    const ModeSpectrum m = dft(s);
    r0_ = m.r_hat[0].real();
    p0_ = m.p_hat[0].real();
    for (std::size_t j = 1; j <= half_; ++j) {
      const cplx ya = y_of(m, j);
      const cplx yb = y_of(m, n_ - j);
      ar_[j - 1] = ya.real();
      ai_[j - 1] = ya.imag();
      br_[j - 1] = yb.real();
      bi_[j - 1] = yb.imag();
    }
    if (has_middle_) {
      const cplx ym = y_of(m, n_ / 2);
      mr_ = ym.real();
      mi_ = ym.imag();
    }
    pending_ = 0.0;
    t_ = s.t;
    events_ = 0;
  }

  ModeSpectrum modes() {
    settle();
    ModeSpectrum m{std::vector<cplx>(n_), std::vector<cplx>(n_)};
    m.r_hat[0] = r0_;
    m.p_hat[0] = p0_;
    for (std::size_t j = 1; j < n_; ++j) {
      const cplx y = y_at(j);
      const cplx yb = std::conj(y_at(n_ - j));
      m.r_hat[j] = 0.5 * phase_[j] * (y + yb);
      m.p_hat[j] = (y - yb) / cplx(0, 2);
    }
    return m;
  }

  // psi^(k) = r^(k) + i p^(k), written into out (size n).
  void psi_hat(std::span<cplx> out) {
    require(out.size() == n_, "psi_hat buffer size mismatch");
    settle();
    out[0] = {r0_, p0_};
    for (std::size_t j = 1; j < n_; ++j) {
      const cplx y = y_at(j);
      const cplx yb = std::conj(y_at(n_ - j));
      out[j] = 0.5 * (phase_[j] * (y + yb) + (y - yb));
    }
  }

  std::vector<cplx> psi_hat() {
    std::vector<cplx> out(n_);
    psi_hat(out);
    return out;
  }

  ChainState state() { return idft(modes(), t_); }

  // H = (r^(0)^2 + p^(0)^2 + sum_j |y_j|^2) / (2n).
  double energy() {
    settle();
    std::vector<double> terms;
    terms.reserve(2 * half_ + 2);
    terms.push_back(r0_ * r0_ + p0_ * p0_);
    for (std::size_t i = 0; i < half_; ++i) {
      terms.push_back(ar_[i] * ar_[i] + ai_[i] * ai_[i]);
      terms.push_back(br_[i] * br_[i] + bi_[i] * bi_[i]);
    }
    if (has_middle_) terms.push_back(mr_ * mr_ + mi_ * mi_);
    return pairwise_sum(terms) / (2.0 * static_cast<double>(n_));
  }

  double elongation_sum() const { return r0_; }

  // Free harmonic flow over dt (macroscopic time).
  void advance(double dt) {
    require(dt >= 0.0, "advance needs dt >= 0");
    if (dt == 0.0) return;
    sweep(dt, false, nullptr, nullptr);
    t_ += dt;
  }

  // p_x = (p^(0) + sum_{j>=1} Im(y_j exp(2 pi i j x / n))) / n.
  double momentum_at(std::size_t x) {
    require(x < n_, "site out of range");
    settle();
    const double* sr = row_sin(x, 0);
    const double* cr = row_cos(x, 0);
    double acc = 0.0;
    for (std::size_t i = 0; i < half_; ++i) acc += (ar_[i] - br_[i]) * sr[i] + (ai_[i] + bi_[i]) * cr[i];
    return (p0_ + acc + middle_term(x)) / static_cast<double>(n_);
  }

  // Sign flip of p_x: p^(k) -= 2 p_x exp(-2 pi i k x).
  void flip_at(std::size_t x) {
    const double px = momentum_at(x);
    apply_flip(x, 2.0 * px);
  }

  // Runs the flip process up to macroscopic time t_end. Because the clock is
  // memoryless, stopping at t_end and resuming later leaves the law intact.
  void run_until(double t_end, RandomStream& rng) {
    require(t_end >= t_, "t_end precedes the current time");
    const auto nn = static_cast<std::uint64_t>(n_);
    for (;;) {
      const double tau = rng.exponential(rate_);
      if (t_ + tau >= t_end) {
        advance(t_end - t_);
        t_ = t_end;
        return;
      }
      const auto x = static_cast<std::size_t>(rng.below(nn));
      const int slot = has_rows_ ? 0 : (pending_slot_ ^ 1);
      const double px = sweep(tau, true, row_sin(x, slot), row_cos(x, slot)) + middle_term(x) / static_cast<double>(n_);
      t_ += tau;
      defer_flip(x, 2.0 * px, slot);
      ++events_;
    }
  }

 private:
  // Largest n for which per-site twiddle rows (n^2 doubles) are tabulated.
  static constexpr std::size_t kMaxRowTable = 1024;

  cplx y_of(const ModeSpectrum& m, std::size_t j) const {
    return std::conj(phase_[j]) * m.r_hat[j] + cplx(0, 1) * m.p_hat[j];
  }

  cplx y_at(std::size_t j) const {
    if (has_middle_ && 2 * j == n_) return {mr_, mi_};
    if (j <= half_) return {ar_[j - 1], ai_[j - 1]};
    return {br_[n_ - j - 1], bi_[n_ - j - 1]};
  }

  void fill_row(std::size_t x, double* s, double* c) const {
    for (std::size_t j = 1; j <= half_; ++j) {
      const std::size_t idx = (j * x) % n_;
      s[j - 1] = sin_tab_[idx];
      c[j - 1] = cos_tab_[idx];
    }
  }

  // Twiddle rows sin/cos(2 pi j x / n), j = 1..half. Without a table the row
  // is built in one of two scratch slots (the other may hold a pending flip).
  const double* row_sin(std::size_t x, int slot) {
    if (has_rows_) return row_sin_.data() + x * half_;
    double* s = scratch_sin_.data() + slot * half_;
    double* c = scratch_cos_.data() + slot * half_;
    fill_row(x, s, c);
    return s;
  }
  const double* row_cos(std::size_t x, int slot) const {
    if (has_rows_) return row_cos_.data() + x * half_;
    return scratch_cos_.data() + slot * half_;
  }

  // Contribution of the mode n/2: sin(pi x) = 0, cos(pi x) = (-1)^x.
  double middle_term(std::size_t x) const {
    if (!has_middle_) return 0.0;
    return (x % 2 == 0) ? mi_ : -mi_;
  }

  void defer_flip(std::size_t x, double d, int slot) {
    pending_ = d;
    pending_x_ = x;
    pending_slot_ = slot;
    p0_ -= d;
    if (has_middle_) mi_ -= (x % 2 == 0) ? d : -d;
  }

  void apply_flip(std::size_t x, double d) {
    settle();
    const int slot = has_rows_ ? 0 : (pending_slot_ ^ 1);
    const double* s = row_sin(x, slot);
    row_cos(x, slot);
    (void)s;
    defer_flip(x, d, slot);
    settle();
  }

  // Applies a deferred flip to the paired arrays.
  void settle() {
    if (pending_ == 0.0) return;
    const double* s = has_rows_ ? row_sin_.data() + pending_x_ * half_ : scratch_sin_.data() + pending_slot_ * half_;
    const double* c = has_rows_ ? row_cos_.data() + pending_x_ * half_ : scratch_cos_.data() + pending_slot_ * half_;
    const double d = pending_;
    for (std::size_t i = 0; i < half_; ++i) {
      ar_[i] -= d * s[i];
      ai_[i] -= d * c[i];
      br_[i] += d * s[i];
      bi_[i] -= d * c[i];
    }
    pending_ = 0.0;
  }

  // One pass over the modes: apply the deferred flip, rotate by
  // exp(-i omega dt), and if rows are given return the paired part of p_x
  // divided by n (DC included, mode n/2 excluded).
  double sweep(double dt, bool project, const double* srow, const double* crow) {
    const double* ps = zero_row_.data();
    const double* pc = zero_row_.data();
    const double pd = pending_;
    if (pd != 0.0) {
      ps = has_rows_ ? row_sin_.data() + pending_x_ * half_ : scratch_sin_.data() + pending_slot_ * half_;
      pc = has_rows_ ? row_cos_.data() + pending_x_ * half_ : scratch_cos_.data() + pending_slot_ * half_;
    }
    pending_ = 0.0;
    if (!project) {
      srow = zero_row_.data();
      crow = zero_row_.data();
    }
    const double theta_max = omega_max_ * dt;
    double acc;
    if (theta_max <= 0.03) {
      acc = sweep_poly<3>(dt, ps, pc, pd, srow, crow);
    } else if (theta_max <= 0.1) {
      acc = sweep_poly<4>(dt, ps, pc, pd, srow, crow);
    } else if (theta_max <= 0.25) {
      acc = sweep_poly<6>(dt, ps, pc, pd, srow, crow);
    } else {
      acc = sweep_libm(dt, ps, pc, pd, srow, crow);
    }
    if (has_middle_) {
      const double th = omega_mid_ * dt;
      double c;
      double s;
      if (th <= 0.25) {
        const double t2 = th * th;
        c = 1.0 + t2 * (-1.0 / 2 + t2 * (1.0 / 24 + t2 * (-1.0 / 720 + t2 * (1.0 / 40320 +
            t2 * (-1.0 / 3628800 + t2 * (1.0 / 479001600))))));
        s = th * (1.0 + t2 * (-1.0 / 6 + t2 * (1.0 / 120 + t2 * (-1.0 / 5040 + t2 * (1.0 / 362880 +
            t2 * (-1.0 / 39916800 + t2 * (1.0 / 6227020800.0)))))));
      } else {
        c = std::cos(th);
        s = std::sin(th);
      }
      const double a = mr_;
      const double b = mi_;
      mr_ = c * a + s * b;
      mi_ = c * b - s * a;
    }
    return project ? (p0_ + acc) / static_cast<double>(n_) : 0.0;
  }

  // Taylor polynomials of cos and sin through theta^(2D) and theta^(2D+1);
  // the tier thresholds keep the truncation error below 1e-17.
  template <int D>
  double sweep_poly(double dt, const double* __restrict ps, const double* __restrict pc, double pd,
                    const double* __restrict sr, const double* __restrict cr) {
    static constexpr double kCos[7] = {1.0, -1.0 / 2, 1.0 / 24, -1.0 / 720, 1.0 / 40320,
                                       -1.0 / 3628800, 1.0 / 479001600};
    static constexpr double kSin[7] = {1.0, -1.0 / 6, 1.0 / 120, -1.0 / 5040, 1.0 / 362880,
                                       -1.0 / 39916800, 1.0 / 6227020800.0};
    double* __restrict ar = ar_.data();
    double* __restrict ai = ai_.data();
    double* __restrict br = br_.data();
    double* __restrict bi = bi_.data();
    const double* __restrict w = omega_.data();
    const std::size_t h = half_;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < h; ++i) {
      const double th = w[i] * dt;
      const double t2 = th * th;
      double c = kCos[D];
      double s = kSin[D];
      for (int m = D - 1; m >= 0; --m) {
        c = c * t2 + kCos[m];
        s = s * t2 + kSin[m];
      }
      s *= th;
      const double a0 = ar[i] - pd * ps[i];
      const double a1 = ai[i] - pd * pc[i];
      const double b0 = br[i] + pd * ps[i];
      const double b1 = bi[i] - pd * pc[i];
      const double na0 = c * a0 + s * a1;
      const double na1 = c * a1 - s * a0;
      const double nb0 = c * b0 + s * b1;
      const double nb1 = c * b1 - s * b0;
      ar[i] = na0;
      ai[i] = na1;
      br[i] = nb0;
      bi[i] = nb1;
      acc += (na0 - nb0) * sr[i] + (na1 + nb1) * cr[i];
    }
    return acc;
  }

  double sweep_libm(double dt, const double* ps, const double* pc, double pd, const double* sr,
                    const double* cr) {
    double acc = 0.0;
    for (std::size_t i = 0; i < half_; ++i) {
      const double th = omega_[i] * dt;
      const double c = std::cos(th);
      const double s = std::sin(th);
      const double a0 = ar_[i] - pd * ps[i];
      const double a1 = ai_[i] - pd * pc[i];
      const double b0 = br_[i] + pd * ps[i];
      const double b1 = bi_[i] - pd * pc[i];
      ar_[i] = c * a0 + s * a1;
      ai_[i] = c * a1 - s * a0;
      br_[i] = c * b0 + s * b1;
      bi_[i] = c * b1 - s * b0;
      acc += (ar_[i] - br_[i]) * sr[i] + (ai_[i] + bi_[i]) * cr[i];
    }
    return acc;
  }

  std::size_t n_;
  double gamma_;
  double rate_ = 0.0;
  std::size_t half_ = 0;
  bool has_middle_ = false;
  double omega_max_ = 0.0;
  double omega_mid_ = 0.0;
  std::vector<double> omega_;
  std::vector<cplx> phase_;
  std::vector<double> sin_tab_, cos_tab_;
  bool has_rows_ = false;
  std::vector<double> row_sin_, row_cos_;
  std::vector<double> scratch_sin_, scratch_cos_;
  std::vector<double> zero_row_;
  std::vector<double> ar_, ai_, br_, bi_;
  double mr_ = 0.0;
  double mi_ = 0.0;
  double r0_ = 0.0;
  double p0_ = 0.0;
  double pending_ = 0.0;
  std::size_t pending_x_ = 0;
  int pending_slot_ = 0;
  double t_ = 0.0;
  std::uint64_t events_ = 0;
};

// Samples the chain at time t_end starting from s.
inline ChainState simulate(const ChainState& s, double t_end, double gamma, RandomStream& rng) {
  require(gamma > 0.0, "gamma must be positive");
  require(t_end >= s.t, "t_end precedes the state time");
  FlipChainSimulator sim(s.size(), gamma);
  sim.load(s);
  sim.run_until(t_end, rng);
  return sim.state();
}

}  // namespace hydrochain
