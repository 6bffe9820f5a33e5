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
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "hydrochain/chain.hpp"
#include "hydrochain/laplace.hpp"
#include "hydrochain/mean_wave.hpp"
#include "hydrochain/mn_matrix.hpp"
#include "hydrochain/profile.hpp"
#include "hydrochain/rng.hpp"
#include "hydrochain/wigner.hpp"

namespace hydrochain {

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

// One line of the verification report.
struct CheckRecord {
  std::string check_id;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json observed;
  nlohmann::json predicted;
  double rel_err = 0.0;
  std::optional<double> conv_order;
  std::optional<double> tolerance;  // gate on rel_err when set
  std::optional<double> min_order;  // gate on conv_order when set
  std::string note;

  bool passed() const {
    if (tolerance && !(rel_err <= *tolerance)) return false;
    if (min_order && !(conv_order && *conv_order >= *min_order)) return false;
    return true;
  }
  bool gated() const { return tolerance.has_value() || min_order.has_value(); }
};

inline void to_json(nlohmann::json& j, const CheckRecord& r) {
  j = nlohmann::json{{"check_id", r.check_id}, {"params", r.params}, {"observed", r.observed},
                     {"predicted", r.predicted}, {"rel_err", r.rel_err}};
  if (r.conv_order) {
    if (std::isinf(*r.conv_order))
      j["conv_order"] = "exact";
    else
      j["conv_order"] = *r.conv_order;
  } else {
    j["conv_order"] = nullptr;
  }
  j["gated"] = r.gated();
  if (r.tolerance) j["tolerance"] = *r.tolerance;
  if (r.min_order) j["min_order"] = *r.min_order;
  j["passed"] = r.passed();
  if (!r.note.empty()) j["note"] = r.note;
}

inline std::vector<std::int64_t> dyadic_sizes(int lo_exp, int hi_exp) {
  std::vector<std::int64_t> v;
  for (int e = lo_exp; e <= hi_exp; ++e) v.push_back(std::int64_t{1} << e);
  return v;
}

// Empirical order p in err ~ C n^-p from a least-squares fit of log err
// against log n. Zero errors are dropped; if fewer than two remain the
// sequence is exact and the order is +infinity.
inline double convergence_order(std::span<const std::int64_t> ns, std::span<const double> errs) {
  require(ns.size() == errs.size(), "sweep lengths differ");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errs[i] > 0.0)) continue;
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::infinity();
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

struct SweepPoint {
  std::int64_t n = 0;
  cplx observed;
  double error = 0.0;
};

struct LimitSweep {
  std::string id;
  cplx predicted;
  std::vector<SweepPoint> points;
  double order = 0.0;

  double final_error() const { return points.empty() ? 0.0 : points.back().error; }

  void finish() {
    std::vector<std::int64_t> ns;
    std::vector<double> es;
    for (const auto& p : points) {
      ns.push_back(p.n);
      es.push_back(p.error);
    }
    order = convergence_order(ns, es);
  }

  CheckRecord record(std::optional<double> min_order = 0.8) const {
    CheckRecord r;
    r.check_id = id;
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& p : points) sweep.push_back({{"n", p.n}, {"observed", complex_json(p.observed)}, {"error", p.error}});
    r.params["sweep"] = sweep;
    r.observed = points.empty() ? nlohmann::json(nullptr) : complex_json(points.back().observed);
    r.predicted = complex_json(predicted);
    r.rel_err = final_error() / std::max(std::abs(predicted), 1e-300);
    if (std::abs(predicted) == 0.0) r.rel_err = final_error();
    r.conv_order = order;
    r.min_order = min_order;
    return r;
  }
};

// ---------------------------------------------------------------------------
// Determinant and inverse identities.

struct DetIdentity {
  double det_direct = 0.0;   // LU in extended precision
  double det_formula = 0.0;  // sum-of-squares expression
  double rel_err = 0.0;
};

inline DetIdentity det_identity(const MnMatrix<double>& m) {
  const auto ml = build_mn<long double>(m.lambda, m.eta, m.j, m.n, m.gamma);
  const Lu4<long double> lu(ml.entries());
  const long double direct = lu.det().real();
  const long double formula = ml.det_formula();
  DetIdentity d;
  d.det_direct = static_cast<double>(direct);
  d.det_formula = static_cast<double>(formula);
  d.rel_err = static_cast<double>(std::abs(direct - formula) / std::abs(direct));
  return d;
}

struct InverseCheck {
  double residual = 0.0;     // ||(M / n^2)(n^2 M^-1) - Id||_F with the closed form
  double lu_deviation = 0.0;  // max entry |closed form - LU| on n^2 M^-1, relative to the largest entry
};

inline InverseCheck inverse_check(const MnMatrix<double>& m) {
  const auto ml = build_mn<long double>(m.lambda, m.eta, m.j, m.n, m.gamma);
  const Mat4<long double> closed = ml.scaled_inverse();
  const Mat4<long double> prod = mat_mul(ml.entries_over_n2(), closed);
  InverseCheck c;
  c.residual = static_cast<double>(frobenius_distance_to_identity(prod));
  const Lu4<long double> lu(ml.entries_over_n2());
  const Mat4<long double> oracle = lu.inverse();  // (M / n^2)^-1 = n^2 M^-1
  long double dev = 0, scale = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      dev = std::max(dev, std::abs(closed[i][j] - oracle[i][j]));
      scale = std::max(scale, std::abs(oracle[i][j]));
    }
  c.lu_deviation = static_cast<double>(dev / scale);
  // The double-precision closed form must match its extended twin.
  const Mat4<double> cd = m.scaled_inverse();
  const Mat4<double> pd = mat_mul(m.entries_over_n2(), cd);
  c.residual = std::max(c.residual, frobenius_distance_to_identity(pd));
  return c;
}

struct MatrixSweepReport {
  std::size_t samples = 0;
  double worst_det_rel_err = 0.0;
  double worst_block_det_rel_err = 0.0;
  double worst_inverse_residual = 0.0;
  double worst_lu_deviation = 0.0;
  double worst_raw_vs_normalized = 0.0;  // n <= 64 only
  double min_normalized_det = std::numeric_limits<double>::infinity();
  std::size_t symmetry_failures = 0;
};

// Random (lambda, gamma, eta, k, n) with lambda in [0.1, 50], gamma in [0.2, 5],
// eta in [-8, 8], n in {2, ..., n_max} and k uniform on the discrete circle.
inline MatrixSweepReport matrix_identity_sweep(std::size_t samples, std::uint64_t seed, std::int64_t n_max = 1024) {
  RandomStream rng(seed);
  MatrixSweepReport rep;
  rep.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const double lambda = 0.1 + 49.9 * rng.uniform_open0();
    const double gamma = 0.2 + 4.8 * rng.uniform_open0();
    const auto eta = static_cast<std::int64_t>(rng.below(17)) - 8;
    const auto n = 2 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_max - 1)));
    const auto j = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
    const auto m = build_mn<double>(lambda, eta, j, n, gamma);
    const DetIdentity d = det_identity(m);
    rep.worst_det_rel_err = std::max(rep.worst_det_rel_err, d.rel_err);
    rep.worst_block_det_rel_err =
        std::max(rep.worst_block_det_rel_err, std::abs(m.det_block_formula() - m.det_formula()) / m.det_formula());
    const InverseCheck ic = inverse_check(m);
    rep.worst_inverse_residual = std::max(rep.worst_inverse_residual, ic.residual);
    rep.worst_lu_deviation = std::max(rep.worst_lu_deviation, ic.lu_deviation);
    rep.min_normalized_det = std::min(rep.min_normalized_det, m.delta_normalized() * static_cast<double>(n * n));
    if (n <= 64) {
      const auto raw = m.raw_inverse();
      const auto sc = m.scaled_inverse();
      const double n2 = static_cast<double>(n * n);
      double dev = 0, scale = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          dev = std::max(dev, std::abs(raw[a][b] * n2 - sc[a][b]));
          scale = std::max(scale, std::abs(sc[a][b]));
        }
      rep.worst_raw_vs_normalized = std::max(rep.worst_raw_vs_normalized, dev / scale);
      const double dn = m.delta_normalized() * n2 * n2 * n2 * n2;
      rep.worst_raw_vs_normalized = std::max(rep.worst_raw_vs_normalized, std::abs(dn - m.det_formula()) / m.det_formula());
    }
    // Symmetry under (eta, k) -> (-eta, -k).
    const auto r = build_mn<double>(lambda, -eta, -j, n, gamma);
    if (r.gn_plus != m.gn_minus || r.gn_minus != m.gn_plus || r.g_plus != m.g_minus || r.g_minus != m.g_plus)
      ++rep.symmetry_failures;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Limits of the inverse.

inline double xi_weight(int eta, int xi) {
  return static_cast<double>(xi) * xi + static_cast<double>(xi + eta) * (xi + eta);
}

// M^-1(lambda, eta, xi/n) -> gamma / (4 lambda gamma + 8 pi^2 q) 1 (x) 1.
inline LimitSweep limit_inverse_small_k(double lambda, int eta, double gamma, int xi,
                                        std::span<const std::int64_t> ns) {
  LimitSweep s;
  s.id = "inverse_limit_small_k";
  const double pred = gamma / (4 * lambda * gamma + 8 * kPi * kPi * xi_weight(eta, xi));
  s.predicted = pred;
  for (auto n : ns) {
    const auto m = build_mn<long double>(lambda, eta, xi, n, gamma);
    const auto inv = m.scaled_inverse();
    const long double n2 = static_cast<long double>(n) * n;
    double err = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) err = std::max(err, static_cast<double>(std::abs(inv[a][b] / n2 - (long double)pred)));
    s.points.push_back({n, cplx(static_cast<double>((inv[0][0] / n2).real()), static_cast<double>((inv[0][0] / n2).imag())), err});
  }
  s.finish();
  return s;
}

// n^2 e.(M^-1(lambda, eta, xi/n) 1) -> 4 pi^2 xi (xi + eta) / (lambda gamma^2 + 2 gamma pi^2 q).
inline cplx mean_pairing_limit(double lambda, int eta, double gamma, int xi) {
  return 4 * kPi * kPi * xi * static_cast<double>(xi + eta) /
         (lambda * gamma * gamma + 2 * gamma * kPi * kPi * xi_weight(eta, xi));
}

inline LimitSweep limit_e_inverse_one(double lambda, int eta, double gamma, int xi, std::span<const std::int64_t> ns) {
  LimitSweep s;
  s.id = "e_inverse_one_limit";
  s.predicted = mean_pairing_limit(lambda, eta, gamma, xi);
  for (auto n : ns) {
    const auto m = build_mn<long double>(lambda, eta, xi, n, gamma);
    const auto v = m.n2_e_minv_one();
    const cplx z(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    s.points.push_back({n, z, std::abs(z - s.predicted)});
  }
  s.finish();
  return s;
}

// Row vector n^2 e^T M^-1.
template <class Real>
Vec4<Real> n2_e_row(const MnMatrix<Real>& m) {
  const auto inv = m.scaled_inverse();
  const auto e = e4<Real>();
  Vec4<Real> row{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) row[b] += e[a] * inv[a][b];
  return row;
}

// n^2 e^T M^-1(lambda, eta, k) -> (2 gamma)^-1 [1, 0, 0, 1] at fixed k = p/q != 0.
inline LimitSweep limit_e_row_fixed_k(double lambda, int eta, double gamma, std::int64_t p, std::int64_t q,
                                      std::span<const std::int64_t> ns) {
  require(q > 0 && p % q != 0, "fixed k must be nonzero");
  LimitSweep s;
  s.id = "e_row_limit_fixed_k";
  s.predicted = 1.0 / (2.0 * gamma);
  const auto u = u4<long double>();
  for (auto n : ns) {
    require(n % q == 0, "sweep size must be divisible by the denominator of k");
    const auto m = build_mn<long double>(lambda, eta, n / q * p, n, gamma);
    const auto row = n2_e_row(m);
    double err = 0;
    for (int b = 0; b < 4; ++b)
      err = std::max(err, static_cast<double>(std::abs(row[b] - u[b] / (2.0L * gamma))));
    s.points.push_back({n, cplx(static_cast<double>(row[0].real()), static_cast<double>(row[0].imag())), err});
  }
  s.finish();
  return s;
}

// n^2 Delta_n(lambda, eta, xi/n) -> 16 gamma^2 [lambda gamma + 2 pi^2 q].
inline LimitSweep limit_det_small_k(double lambda, int eta, double gamma, int xi, std::span<const std::int64_t> ns) {
  LimitSweep s;
  s.id = "det_limit_small_k";
  s.predicted = 16 * gamma * gamma * (lambda * gamma + 2 * kPi * kPi * xi_weight(eta, xi));
  for (auto n : ns) {
    const auto m = build_mn<long double>(lambda, eta, xi, n, gamma);
    const double v = static_cast<double>(m.delta_normalized() * static_cast<long double>(n) * n);
    s.points.push_back({n, v, std::abs(v - s.predicted.real())});
  }
  s.finish();
  return s;
}

// ---------------------------------------------------------------------------
// The scalar M_n and S_n.

struct SnResult {
  std::int64_t n = 0;
  double m_scalar = 0.0;     // M_n = [e.(M^-1 e)]_n (real part)
  double gamma_n2_m = 0.0;   // gamma n^2 M_n, tends to 1
  double s_n = 0.0;          // n^2 (1 - gamma n^2 M_n)
  double limit = 0.0;        // (2 gamma)^-1 (lambda + eta^2 pi^2 / gamma)
  double gap = 0.0;
  double imag_part = 0.0;    // |Im n^2 M_n|, zero up to rounding
};

inline double sn_limit(double lambda, int eta, double gamma) {
  return (lambda + eta * eta * kPi * kPi / gamma) / (2 * gamma);
}

inline SnResult sn_check(double lambda, int eta, double gamma, std::int64_t n) {
  require(n >= 1, "n must be positive");
  std::complex<long double> acc = 0;
  const auto e = e4<long double>();
  for (std::int64_t j = 0; j < n; ++j) {
    const auto m = build_mn<long double>(lambda, eta, j, n, gamma);
    acc += dot4(n2_e_row(m), e);
  }
  const long double nn = static_cast<long double>(n);
  const std::complex<long double> n2m = acc / nn;  // n^2 M_n
  SnResult r;
  r.n = n;
  r.m_scalar = static_cast<double>(n2m.real() / (nn * nn));
  r.gamma_n2_m = static_cast<double>(gamma * n2m.real());
  r.s_n = static_cast<double>(nn * nn * (1.0L - gamma * n2m.real()));
  r.limit = sn_limit(lambda, eta, gamma);
  r.gap = std::abs(r.s_n - r.limit);
  r.imag_part = static_cast<double>(std::abs(n2m.imag()));
  return r;
}

inline LimitSweep limit_sn(double lambda, int eta, double gamma, std::span<const std::int64_t> ns) {
  LimitSweep s;
  s.id = "s_n_limit";
  s.predicted = sn_limit(lambda, eta, gamma);
  for (auto n : ns) {
    const SnResult r = sn_check(lambda, eta, gamma, n);
    s.points.push_back({n, r.s_n, r.gap});
  }
  s.finish();
  return s;
}

inline LimitSweep limit_gamma_n2_m(double lambda, int eta, double gamma, std::span<const std::int64_t> ns) {
  LimitSweep s;
  s.id = "gamma_n2_m_limit";
  s.predicted = 1.0;
  for (auto n : ns) {
    const SnResult r = sn_check(lambda, eta, gamma, n);
    s.points.push_back({n, r.gamma_n2_m, std::abs(r.gamma_n2_m - 1.0)});
  }
  s.finish();
  return s;
}

// int_T sin^2(2 pi v) / (2 (1 - cos 2 pi v)) dv and the form before the
// trigonometric reduction,
//   int_T [4 sin(2 pi v) sin^2(pi v) + sin(4 pi v)]^2 / (4 sin^2(2 pi v) + 16 sin^4(pi v)) dv.
// 1 - cos(2 pi v) is evaluated as 2 sin^2(pi v) to keep digits near v = 0.
struct TrigClosure {
  double reduced = 0.0;
  double unreduced = 0.0;
  double error_estimate = 0.0;
};

inline TrigClosure trig_closure_integral() {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [](double v) {
    const double s2 = std::sin(kTwoPi * v);
    const double s1 = std::sin(kPi * v);
    return s2 * s2 / (4.0 * s1 * s1);
  };
  auto g = [](double v) {
    const double s2 = std::sin(kTwoPi * v);
    const double s1 = std::sin(kPi * v);
    const double num = 4.0 * s2 * s1 * s1 + std::sin(2.0 * kTwoPi * v);
    return num * num / (4.0 * s2 * s2 + 16.0 * s1 * s1 * s1 * s1);
  };
  TrigClosure t;
  double err = 0.0;
  t.reduced = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14, &err);
  t.error_estimate = err;
  t.unreduced = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-14, &err);
  t.error_estimate = std::max(t.error_estimate, err);
  return t;
}

// ---------------------------------------------------------------------------
// Coefficient asymptotics at fixed k = p/q.

struct CoefficientAsymptotics {
  // Per coefficient name: errors against the displayed bracket and against
  // the complete first-order bracket, with fitted orders.
  struct Entry {
    std::string name;
    std::vector<double> stated_err, full_err;
    double stated_order = 0.0, full_order = 0.0;
  };
  std::vector<std::int64_t> ns;
  std::vector<Entry> entries;
};

inline CoefficientAsymptotics coefficient_asymptotics(double lambda, int eta, double gamma, std::int64_t p,
                                                      std::int64_t q, std::span<const std::int64_t> ns) {
  CoefficientAsymptotics out;
  out.ns.assign(ns.begin(), ns.end());
  const char* names[] = {"d_plus", "d_minus", "d", "d0", "c", "c0"};
  for (const char* nm : names) out.entries.push_back({nm, {}, {}, 0.0, 0.0});
  for (auto n : ns) {
    require(n % q == 0, "sweep size must be divisible by the denominator of k");
    const auto m = build_mn<long double>(lambda, eta, n / q * p, n, gamma);
    const auto c = m.coefficients();
    const auto br = coefficient_brackets(m);
    auto pick = [](const MnCoefficients<long double>& x, int i) {
      switch (i) {
        case 0: return x.d_plus;
        case 1: return x.d_minus;
        case 2: return x.d;
        case 3: return x.d0;
        case 4: return x.c;
        default: return x.c0;
      }
    };
    for (int i = 0; i < 6; ++i) {
      out.entries[i].stated_err.push_back(static_cast<double>(std::abs(pick(c, i) - pick(br.stated, i))));
      out.entries[i].full_err.push_back(static_cast<double>(std::abs(pick(c, i) - pick(br.full, i))));
    }
  }
  for (auto& e : out.entries) {
    e.stated_order = convergence_order(out.ns, e.stated_err);
    e.full_order = convergence_order(out.ns, e.full_err);
  }
  return out;
}

// sup |C_n| with C_n = n^3 (Delta_n - leading terms) over a sampled grid.
struct DetStructureReport {
  double sup_remainder = 0.0;
  std::int64_t worst_n = 0;
  std::int64_t worst_j = 0;
  int worst_eta = 0;
  double worst_lambda = 0.0;
};

inline DetStructureReport det_structure_report(std::span<const double> lambdas, int eta_max, double gamma,
                                               std::span<const std::int64_t> ns, std::int64_t k_samples = 64) {
  DetStructureReport r;
  for (double lambda : lambdas)
    for (int eta = -eta_max; eta <= eta_max; ++eta)
      for (auto n : ns) {
        const std::int64_t stride = std::max<std::int64_t>(1, n / k_samples);
        for (std::int64_t j = 0; j < n; j += stride) {
          const auto m = build_mn<long double>(lambda, eta, j, n, gamma);
          const long double nn = static_cast<long double>(n);
          const double c = static_cast<double>(std::abs(m.delta_normalized() - m.delta_leading()) * nn * nn * nn);
          if (c > r.sup_remainder) {
            r.sup_remainder = c;
            r.worst_n = n;
            r.worst_j = j;
            r.worst_eta = eta;
            r.worst_lambda = lambda;
          }
        }
      }
  return r;
}

// ---------------------------------------------------------------------------
// Thermal initial term gamma n^2 [e.(M^-1 v~0)]_n.

// Row vectors n^2 e^T M^-1(lambda, eta, j/n) for j = 0..n-1.
inline std::vector<Vec4<double>> e_row_table(std::int64_t n, double lambda, int eta, double gamma) {
  std::vector<Vec4<double>> rows(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) rows[static_cast<std::size_t>(j)] = n2_e_row(build_mn<double>(lambda, eta, j, n, gamma));
  return rows;
}

// k in the separated set {|sin(pi k)| >= n^-rho}.
inline bool in_separated_set(std::int64_t j, std::int64_t n, double rho) {
  return std::abs(sin_pi_ratio(j, n)) >= std::pow(static_cast<double>(n), -rho);
}

struct Z0Split {
  cplx value;          // gamma n^2 [e.(M^-1 v~0)]_n
  cplx predicted;      // F(e_thm(0))(eta)
  cplx average_part;   // (2 gamma)^-1 ([W~+]_n + [W~-]_n)
  cplx k1, k2;         // remainders over the separated set and its complement
  std::size_t separated_count = 0;
  double stderr_value = 0.0;  // per-sample standard error when available
};

inline Vec4<cplx::value_type> field_vector(const WignerField& f, int eta, std::size_t j) {
  return {f.at(Species::WPlus, eta, j), f.at(Species::YPlus, eta, j), f.at(Species::YMinus, eta, j),
          f.at(Species::WMinus, eta, j)};
}

inline Z0Split z0_limit(const WignerField& v_tilde, double lambda, int eta, double gamma, double rho,
                        cplx predicted) {
  require(rho > 0.0 && rho < 0.5, "rho must lie in (0, 1/2)");
  const auto n = static_cast<std::int64_t>(v_tilde.n());
  const auto rows = e_row_table(n, lambda, eta, gamma);
  const auto u = u4<double>();
  std::vector<cplx> tot, t1, t2;
  Z0Split z;
  for (std::int64_t j = 0; j < n; ++j) {
    const auto v = field_vector(v_tilde, eta, static_cast<std::size_t>(j));
    const auto& row = rows[static_cast<std::size_t>(j)];
    tot.push_back(dot4(row, v));
    Vec4<double> dev;
    for (int b = 0; b < 4; ++b) dev[b] = row[b] - u[b] / (2 * gamma);
    if (in_separated_set(j, n, rho)) {
      t1.push_back(dot4(dev, v));
      ++z.separated_count;
    } else {
      t2.push_back(dot4(dev, v));
    }
  }
  const double nn = static_cast<double>(n);
  z.value = gamma * pairwise_sum(tot) / nn;
  z.k1 = pairwise_sum(t1) / nn;
  z.k2 = pairwise_sum(t2) / nn;
  z.average_part = (v_tilde.k_average(Species::WPlus, eta) + v_tilde.k_average(Species::WMinus, eta)) / (2 * gamma);
  z.predicted = predicted;
  return z;
}

// Same functional applied sample by sample to the deviations psi_s - mean;
// the sample mean reproduces z0_limit on the 1/M covariance field and the
// spread gives a standard error.
inline Z0Split z0_from_waves(std::span<const std::vector<cplx>> psi_hats, double lambda, int eta, double gamma,
                             double rho, cplx predicted) {
  require(psi_hats.size() >= 2, "need at least two samples");
  const std::size_t n = psi_hats[0].size();
  std::vector<cplx> mean(n, 0.0);
  for (const auto& h : psi_hats) {
    require(h.size() == n, "samples differ in size");
    for (std::size_t j = 0; j < n; ++j) mean[j] += h[j];
  }
  for (auto& z : mean) z /= static_cast<double>(psi_hats.size());
  const auto ni = static_cast<std::int64_t>(n);
  const auto rows = e_row_table(ni, lambda, eta, gamma);
  ComplexStats stats;
  std::vector<cplx> dev(n);
  for (const auto& h : psi_hats) {
    for (std::size_t j = 0; j < n; ++j) dev[j] = h[j] - mean[j];
    const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto ji = static_cast<std::int64_t>(j);
      const cplx a = dev[static_cast<std::size_t>(wrap_index(ji + eta, ni))];
      const cplx am = dev[static_cast<std::size_t>(wrap_index(-ji - eta, ni))];
      const cplx b = dev[j];
      const cplx bm = dev[static_cast<std::size_t>(wrap_index(-ji, ni))];
      const Vec4<double> v = {inv2n * a * std::conj(b), inv2n * a * bm, inv2n * std::conj(am) * std::conj(b),
                              inv2n * std::conj(am) * bm};
      acc += dot4(rows[j], v);
    }
    stats.add(gamma * acc / static_cast<double>(n));
  }
  // Bulk split from the covariance field.
  WignerAccumulator accw(n, std::abs(eta));
  for (const auto& h : psi_hats) {
    for (std::size_t j = 0; j < n; ++j) dev[j] = h[j] - mean[j];
    accw.add(dev);
  }
  Z0Split z = z0_limit(accw.finalize(), lambda, eta, gamma, rho, predicted);
  z.stderr_value = stats.stderr_abs();
  return z;
}

// Exact fluctuation Wigner field of a local Gibbs state with temperature
// profile T: W~+ = W~- = n^-1 sum_x T(x/n) exp(-2 pi i x eta / n) for all k,
// Y~+ = Y~- = 0 (elongation and momentum variances coincide).
inline WignerField local_gibbs_fluctuation_wigner(const MacroProfile& temperature, std::size_t n, int eta_max) {
  WignerField f(n, eta_max);
  const auto t = temperature.sample(n);
  const auto th = dft(std::span<const double>(t));
  const auto ni = static_cast<std::int64_t>(n);
  for (int eta = -eta_max; eta <= eta_max; ++eta) {
    const cplx w = th[static_cast<std::size_t>(wrap_index(eta, ni))] / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      f.at(Species::WPlus, eta, j) = w;
      f.at(Species::WMinus, eta, j) = w;
    }
  }
  f.ensemble_count = 0;
  return f;
}

// ---------------------------------------------------------------------------
// Exact finite-n expectation of the Laplace-Wigner vector:
//   w = M^-1 (v0 + gamma n^2 I e),  I = [e.(M^-1 v0)]_n / (1 - gamma n^2 [e.(M^-1 e)]_n).
inline WignerField exact_laplace_wigner(const WignerField& v0, double lambda, double gamma) {
  const std::size_t n = v0.n();
  const auto ni = static_cast<std::int64_t>(n);
  const int em = v0.eta_max();
  WignerField out(n, em);
  out.ensemble_count = v0.ensemble_count;
  const long double n2 = static_cast<long double>(n) * static_cast<long double>(n);
  for (int eta = -em; eta <= em; ++eta) {
    std::vector<Mat4<long double>> inv(n);
    std::complex<long double> zv = 0, zm = 0;
    const auto e = e4<long double>();
    for (std::size_t j = 0; j < n; ++j) {
      inv[j] = build_mn<long double>(lambda, eta, static_cast<std::int64_t>(j), ni, gamma).scaled_inverse();
      const auto v = field_vector(v0, eta, j);
      Vec4<long double> vl;
      for (int b = 0; b < 4; ++b) vl[b] = std::complex<long double>(v[b].real(), v[b].imag());
      Vec4<long double> row{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) row[b] += e[a] * inv[j][a][b];
      zv += dot4(row, vl);
      zm += dot4(row, e);
    }
    zv /= static_cast<long double>(n);  // n^2 [e.(M^-1 v0)]_n
    zm /= static_cast<long double>(n);  // n^2 [e.(M^-1 e)]_n
    const std::complex<long double> big_i = (zv / n2) / (1.0L - static_cast<long double>(gamma) * zm);
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = field_vector(v0, eta, j);
      Vec4<long double> rhs;
      for (int b = 0; b < 4; ++b)
        rhs[b] = std::complex<long double>(v[b].real(), v[b].imag()) / n2 + static_cast<long double>(gamma) * big_i * e[b];
      const auto w = mat_vec(inv[j], rhs);
      for (Species s : kAllSpecies) {
        const auto& z = w[static_cast<int>(s)];
        out.at(s, eta, j) = cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mean system.

// Mean wave of a deterministic elongation profile sampled on the chain, p = 0.
inline std::vector<cplx> mean_wave_of_profile(const MacroProfile& r0, std::size_t n) {
  const auto r = r0.sample(n);
  return dft(std::span<const double>(r));
}

// Right-hand side of the autonomous mean Wigner system at one cell.
inline Vec4<double> mean_system_rhs(const Vec4<double>& v, std::int64_t n, std::int64_t j, int eta, double gamma) {
  const double nn = static_cast<double>(n), n2 = nn * nn;
  const double sk = sin_pi_ratio(2 * j, n), skn = sin_pi_ratio(2 * (j + eta), n);
  const double s1 = sin_pi_ratio(j + eta, n), s0 = sin_pi_ratio(j, n);
  const double ds = 2 * nn * (s1 * s1 - s0 * s0);
  const double ss = 2 * (s1 * s1 + s0 * s0);
  const cplx i(0, 1);
  const cplx wp = v[0], yp = v[1], ym = v[2], wm = v[3];
  const double g = gamma * n2;
  return {-i * nn * ds * wp - n2 * sk * yp - n2 * skn * ym - g * (2.0 * wp - yp - ym),
          n2 * sk * wp - i * n2 * ss * yp - n2 * skn * wm - g * (2.0 * yp - wp - wm),
          n2 * skn * wp + i * n2 * ss * ym - n2 * sk * wm - g * (2.0 * ym - wp - wm),
          i * nn * ds * wm + n2 * skn * yp + n2 * sk * ym - g * (2.0 * wm - yp - ym)};
}

struct ResidualReport {
  double max_relative = 0.0;
  double worst_t = 0.0;
  std::vector<double> per_t;
};

// Five-point central differences in t of the mean Wigner functions against
// the autonomous mean system. Relative residual = max |d/dt - rhs| over all
// cells divided by max |rhs| (or max |d/dt| when larger).
inline ResidualReport closed_overline_residual(const MacroProfile& r0, std::size_t n, std::span<const double> t_grid,
                                               double gamma, int eta_max, std::optional<double> step = std::nullopt) {
  require(2 * static_cast<std::size_t>(eta_max) < n, "need 2 eta_max < n");
  const double h = step ? *step : 1e-3 / (gamma * static_cast<double>(n) * static_cast<double>(n) + 1.0);
  const auto psi0 = mean_wave_of_profile(r0, n);
  const auto ni = static_cast<std::int64_t>(n);
  auto field_at = [&](double t) { return wigner_of_wave(evolve_mean_wave(psi0, t, gamma), eta_max); };
  ResidualReport rep;
  for (double t : t_grid) {
    require(t - 2 * h >= 0.0, "residual time too close to 0 for the stencil");
    const WignerField fm2 = field_at(t - 2 * h), fm1 = field_at(t - h), f0 = field_at(t), fp1 = field_at(t + h),
                      fp2 = field_at(t + 2 * h);
    double worst = 0.0, scale = 0.0;
    for (int eta = -eta_max; eta <= eta_max; ++eta)
      for (std::size_t j = 0; j < n; ++j) {
        const auto rhs = mean_system_rhs(field_vector(f0, eta, j), ni, static_cast<std::int64_t>(j), eta, gamma);
        for (Species s : kAllSpecies) {
          const cplx d = (fm2.at(s, eta, j) - 8.0 * fm1.at(s, eta, j) + 8.0 * fp1.at(s, eta, j) - fp2.at(s, eta, j)) /
                         (12.0 * h);
          const cplx r = rhs[static_cast<int>(s)];
          worst = std::max(worst, std::abs(d - r));
          scale = std::max({scale, std::abs(r), std::abs(d)});
        }
      }
    const double rel = scale > 0.0 ? worst / scale : worst;
    rep.per_t.push_back(rel);
    if (rel > rep.max_relative) {
      rep.max_relative = rel;
      rep.worst_t = t;
    }
  }
  return rep;
}

// Exact Laplace transform of the mean Wigner functions. Each mode pair
// (r^_j, p^_j) solves a linear system u' = A_j u, A_j = [[0, c_j], [-conj c_j, -2 gamma n^2]],
// so products Z = u v^T obey Z' = A Z + Z B^T and their transforms solve the
// Sylvester system (lambda - A (x) I - I (x) B) vec Z^ = vec Z(0).
inline WignerField mean_laplace_wigner_exact(std::span<const cplx> psi0, double gamma, double lambda, int eta_max) {
  const std::size_t n = psi0.size();
  const auto ni = static_cast<std::int64_t>(n);
  const ModeSpectrum ms = split_wave(psi0);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  auto gen = [&](std::size_t j) {
    const cplx c = ModeRotation::of(j, n).coupling();
    return std::array<cplx, 4>{0.0, c, -std::conj(c), -2.0 * gamma * n2};
  };
  auto solve = [&](const std::array<cplx, 4>& a, const std::array<cplx, 4>& b, const std::array<cplx, 2>& u0,
                   const std::array<cplx, 2>& v0) {
    Mat4<double> k{};
    Vec4<double> z0{};
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const int row = 2 * p + q;
        z0[row] = u0[p] * v0[q];
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) {
            const int col = 2 * r + s;
            cplx val = (row == col) ? cplx(lambda) : cplx(0.0);
            if (q == s) val -= a[2 * p + r];
            if (p == r) val -= b[2 * q + s];
            k[row][col] = val;
          }
      }
    return Lu4<double>(k).solve(z0);
  };
  WignerField f(n, eta_max);
  const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
  const cplx i(0, 1);
  for (int eta = -eta_max; eta <= eta_max; ++eta)
    for (std::size_t j = 0; j < n; ++j) {
      const auto jp = static_cast<std::size_t>(wrap_index(static_cast<std::int64_t>(j) + eta, ni));
      const auto jm = static_cast<std::size_t>(wrap_index(-static_cast<std::int64_t>(j), ni));
      const auto aj = gen(jp);
      const std::array<cplx, 2> u0 = {ms.r_hat[jp], ms.p_hat[jp]};
      // W+: psi(j') conj psi(j)
      auto bj = gen(j);
      for (auto& x : bj) x = std::conj(x);
      const auto zw = solve(aj, bj, u0, {std::conj(ms.r_hat[j]), std::conj(ms.p_hat[j])});
      const cplx w = zw[0] - i * zw[1] + i * zw[2] + zw[3];
      // Y+: psi(j') psi(-j)
      const auto zy = solve(aj, gen(jm), u0, {ms.r_hat[jm], ms.p_hat[jm]});
      const cplx y = zy[0] + i * zy[1] + i * zy[2] - zy[3];
      f.at(Species::WPlus, eta, j) = inv2n * w;
      f.at(Species::YPlus, eta, j) = inv2n * y;
    }
  f.reflect_minus_species();
  return f;
}

// Residual of M w~ = v0 for the exact mean Laplace-Wigner vector, relative to max |v0|.
inline double mech_laplace_residual(const MacroProfile& r0, std::size_t n, double lambda, double gamma, int eta_max) {
  const auto psi0 = mean_wave_of_profile(r0, n);
  const WignerField w = mean_laplace_wigner_exact(psi0, gamma, lambda, eta_max);
  const WignerField v0 = wigner_of_wave(psi0, eta_max);
  const auto ni = static_cast<std::int64_t>(n);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  double worst = 0.0, scale = 0.0;
  for (int eta = -eta_max; eta <= eta_max; ++eta)
    for (std::size_t j = 0; j < n; ++j) {
      const auto m = build_mn<double>(lambda, eta, static_cast<std::int64_t>(j), ni, gamma);
      const auto mw = mat_vec(m.entries_over_n2(), field_vector(w, eta, j));
      const auto v = field_vector(v0, eta, j);
      for (int b = 0; b < 4; ++b) {
        worst = std::max(worst, std::abs(mw[b] - v[b] / n2));
        scale = std::max(scale, std::abs(v[b] / n2));
      }
    }
  return scale > 0.0 ? worst / scale : worst;
}

struct MechanicalPairing {
  cplx observed;          // sum_eta [w~+(lambda, eta, .) conj FG(eta, .)]_n with w~ = M^-1 v0
  cplx predicted;         // sum_eta W_mech(lambda, eta) conj FG(eta, 0)
  double abs_err = 0.0;
  std::vector<cplx> dissipation_observed;   // gamma n^2 I~_n(lambda, eta), eta = -M..M
  std::vector<cplx> dissipation_predicted;  // (2 gamma)^-1 L[F((d_u r)^2)(eta)](lambda)
  double dissipation_abs_err = 0.0;
};

inline MechanicalPairing mechanical_pairing(const MacroProfile& r0, std::size_t n, double lambda, double gamma,
                                            const TestFunction& g) {
  const int em = g.eta_max;
  require(2 * static_cast<std::size_t>(em) < n, "need 2 eta_max < n");
  const auto psi0 = mean_wave_of_profile(r0, n);
  const WignerField v0 = wigner_of_wave(psi0, em);
  const auto ni = static_cast<std::int64_t>(n);
  const double nn = static_cast<double>(n);
  MechanicalPairing out;
  const MacroProfile zero = MacroProfile::constant(1.0);
  std::vector<cplx> terms;
  for (int eta = -em; eta <= em; ++eta) {
    std::vector<cplx> diss;
    for (std::size_t j = 0; j < n; ++j) {
      const auto m = build_mn<double>(lambda, eta, static_cast<std::int64_t>(j), ni, gamma);
      const auto inv = m.scaled_inverse();
      const auto v = field_vector(v0, eta, j);
      const auto w = mat_vec(inv, v);  // n^2 w~
      const double k = static_cast<double>(j) / nn;
      terms.push_back(w[0] / (nn * nn) * std::conj(g.fourier(eta, k)));
      diss.push_back(gamma * dot4(e4<double>(), w));
    }
    out.dissipation_observed.push_back(pairwise_sum(diss) / nn);
    out.dissipation_predicted.push_back(dissipation_laplace(r0, gamma, lambda, eta) / gamma);
    const LaplaceTargets t = mech_thermal_laplace_targets(r0, zero, gamma, lambda, eta);
    out.predicted += t.mech * std::conj(g.fourier(eta, 0.0));
  }
  out.observed = pairwise_sum(terms) / nn;
  out.abs_err = std::abs(out.observed - out.predicted);
  for (std::size_t i = 0; i < out.dissipation_observed.size(); ++i)
    out.dissipation_abs_err =
        std::max(out.dissipation_abs_err, std::abs(out.dissipation_observed[i] - out.dissipation_predicted[i]));
  return out;
}

}  // namespace hydrochain
