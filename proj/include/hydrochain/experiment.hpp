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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrochain/config.hpp"
#include "hydrochain/ensemble.hpp"
#include "hydrochain/initial.hpp"
#include "hydrochain/laplace.hpp"
#include "hydrochain/macro_pde.hpp"
#include "hydrochain/simulator.hpp"
#include "hydrochain/svg.hpp"
#include "hydrochain/verification.hpp"

namespace hydrochain {

// Run exceeds the --max-events budget; maps to exit code 2.
class BudgetError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;       // overrides the config seed
  std::optional<double> max_events;        // abort when the estimate exceeds this
  bool deterministic = true;               // false allows a timestamp in SVG files
  std::function<void(const std::string&)> log;
};

// Long-format result table: n, t, quantity, coord, value, stderr, reference.
struct ResultRow {
  std::size_t n = 0;
  double t = 0.0;
  std::string quantity;
  std::string coord;
  double value = 0.0;
  double stderr_value = std::numeric_limits<double>::quiet_NaN();
  double reference = std::numeric_limits<double>::quiet_NaN();
};

class ResultsTable {
 public:
  void add(std::size_t n, double t, std::string quantity, std::string coord, double value,
           double se = std::numeric_limits<double>::quiet_NaN(),
           double reference = std::numeric_limits<double>::quiet_NaN()) {
    rows_.push_back({n, t, std::move(quantity), std::move(coord), value, se, reference});
  }
  const std::vector<ResultRow>& rows() const { return rows_; }

  void write_csv(std::ostream& os) const {
    os << "n,t,quantity,coord,value,stderr,reference\n";
    for (const auto& r : rows_) {
      os << r.n << ',' << num(r.t) << ',' << r.quantity << ',' << r.coord << ',' << num(r.value) << ','
         << num(r.stderr_value) << ',' << num(r.reference) << '\n';
    }
  }

  static std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  std::vector<ResultRow> rows_;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  double estimated_events = 0.0;
  ResultsTable table;
  std::vector<CheckRecord> checks;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::pair<std::string, SvgPlot>> plots;
  std::vector<std::pair<std::string, std::string>> extra_files;  // relative path, contents

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed(); });
  }
  const CheckRecord* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.check_id == id) return &c;
    return nullptr;
  }

  nlohmann::json report() const {
    nlohmann::json j;
    j["schema_version"] = kConfigVersion;
    j["kind"] = kind_name(config.kind);
    j["description"] = config.description;
    j["seed"] = seed;
    j["estimated_events"] = estimated_events;
    j["n_list"] = config.n_list;
    j["gamma"] = config.gamma;
    j["ensemble_size"] = config.ensemble_size;
    j["tau0"] = config.tau0_spec;
    j["temperature0"] = config.temperature0_spec;
    j["summary"] = summary;
    j["checks"] = checks;
    j["passed"] = passed();
    return j;
  }
};

// gamma sum_n n^3 t M, the expected number of flip events.
inline double estimate_events(const ExperimentConfig& c) {
  double horizon = c.t_end;
  double copies = static_cast<double>(c.ensemble_size);
  switch (c.kind) {
    case ExperimentKind::MatrixVerify: return 0.0;
    case ExperimentKind::WignerLe:
      horizon = c.laplace_horizon > 0.0 ? c.laplace_horizon
                                        : 8.0 / *std::min_element(c.lambdas.begin(), c.lambdas.end());
      break;
    case ExperimentKind::Hydro: copies *= static_cast<double>(c.replicates); break;
    case ExperimentKind::Equilibrium: break;
  }
  double s = 0.0;
  for (auto n : c.n_list) s += std::pow(static_cast<double>(n), 3);
  return c.gamma * s * horizon * copies;
}

namespace experiment_detail {

inline void say(const RunOptions& o, const std::string& m) {
  if (o.log) o.log(m);
}

// Root seed of the ensemble for chain size n and replicate r.
inline std::uint64_t ensemble_root(std::uint64_t seed, std::size_t n, std::size_t replicate) {
  return stream_seed(stream_seed(seed, n), replicate);
}

// One simulator per thread, rebuilt when the size changes; load() resets it.
inline FlipChainSimulator& thread_simulator(std::size_t n, double gamma) {
  thread_local std::unique_ptr<FlipChainSimulator> sim;
  if (!sim || sim->size() != n || sim->gamma() != gamma) sim = std::make_unique<FlipChainSimulator>(n, gamma);
  return *sim;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Statistical gate: |observed - reference| <= allowed.
inline CheckRecord ci_record(std::string id, nlohmann::json params, double observed, double reference, double se,
                             double sigma, double extra = 0.0) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.params = std::move(params);
  r.params["stderr"] = se;
  r.params["sigma"] = sigma;
  r.observed = observed;
  r.predicted = reference;
  r.rel_err = std::abs(observed - reference);
  r.tolerance = sigma * se + extra;
  r.note = "rel_err holds |observed - predicted|; tolerance is the CI half-width";
  return r;
}

inline std::string dump_rows(const std::vector<ChainState>& snaps) {
  std::ostringstream os;
  os << "t,x,r_x,p_x\n";
  for (const auto& s : snaps)
    for (std::size_t x = 0; x < s.size(); ++x)
      os << ResultsTable::num(s.t) << ',' << x << ',' << ResultsTable::num(s.r[x]) << ','
         << ResultsTable::num(s.p[x]) << '\n';
  return os.str();
}

// Trajectory 0 of replicate 0 at the snapshot times, replayed serially.
inline std::string trajectory_dump(const ExperimentConfig& c, std::uint64_t seed, std::size_t n) {
  RandomStream rng = RandomStream::for_trajectory(ensemble_root(seed, n, 0), 0);
  FlipChainSimulator sim(n, c.gamma);
  sim.load(local_gibbs_sample(c.tau0, c.temperature0, n, rng));
  std::vector<ChainState> snaps;
  for (double t : c.t_snapshots) {
    sim.run_until(t, rng);
    snaps.push_back(sim.state());
  }
  return dump_rows(snaps);
}

}  // namespace experiment_detail

// ---------------------------------------------------------------------------
// Hydrodynamic limit.

struct HydroAccumulator {
  std::size_t snaps = 0, n = 0, width = 0;
  std::vector<ScalarStats> site_r, site_e;  // [snapshot][x]
  std::vector<ComplexStats> coef_r, coef_e;  // [snapshot][eta + eta_max]

  HydroAccumulator(std::size_t s, std::size_t n_in, int eta_max)
      : snaps(s), n(n_in), width(2 * static_cast<std::size_t>(eta_max) + 1),
        site_r(s * n_in), site_e(s * n_in), coef_r(s * width), coef_e(s * width) {}

  void merge(const HydroAccumulator& o) {
    for (std::size_t i = 0; i < site_r.size(); ++i) {
      site_r[i].merge(o.site_r[i]);
      site_e[i].merge(o.site_e[i]);
    }
    for (std::size_t i = 0; i < coef_r.size(); ++i) {
      coef_r[i].merge(o.coef_r[i]);
      coef_e[i].merge(o.coef_e[i]);
    }
  }
};

// L2(T) distance between the projection |eta| <= E of the empirical profile
// and the full PDE profile, plus the Monte Carlo noise level of the projection.
struct ProfileError {
  double l2 = 0.0;
  double noise = 0.0;
};

inline ProfileError projected_l2_error(std::span<const ComplexStats> coef, int eta_max, const SpectralField& pde) {
  ProfileError e;
  double s = 0.0, v = 0.0;
  for (int eta = -eta_max; eta <= eta_max; ++eta) {
    const auto& c = coef[static_cast<std::size_t>(eta + eta_max)];
    s += std::norm(c.mean() - pde.at(eta));
    v += c.stderr_re() * c.stderr_re() + c.stderr_im() * c.stderr_im();
  }
  for (int eta = -pde.n_modes(); eta <= pde.n_modes(); ++eta)
    if (std::abs(eta) > eta_max) s += std::norm(pde[eta]);
  e.l2 = std::sqrt(s);
  e.noise = std::sqrt(v);
  return e;
}

// Root-mean-square over blocks of the difference of block averages.
inline double block_error(std::span<const double> emp, std::span<const double> pde, std::size_t blocks) {
  const std::size_t n = emp.size();
  blocks = std::max<std::size_t>(1, std::min(blocks, n));
  double s = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * n / blocks, hi = (b + 1) * n / blocks;
    double d = 0.0;
    for (std::size_t x = lo; x < hi; ++x) d += emp[x] - pde[x];
    d /= static_cast<double>(hi - lo);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(blocks));
}

inline ExperimentResult run_hydro(const ExperimentConfig& c, const RunOptions& opt, ExperimentResult res) {
  using namespace experiment_detail;
  const std::size_t S = c.t_snapshots.size();
  const int E = c.eta_max;
  const MacroPdeSolver pde(c.tau0, c.temperature0, c.gamma, c.n_modes);
  std::vector<SpectralField> pde_r, pde_e;
  for (double t : c.t_snapshots) {
    const MacroState st = pde.state(t);
    pde_r.push_back(st.r_hat);
    pde_e.push_back(total_energy_profile(st).e);
  }
  // err[n index][snapshot][replicate]
  std::vector<std::vector<std::vector<double>>> err_r(c.n_list.size()), err_e(c.n_list.size());
  for (std::size_t ni = 0; ni < c.n_list.size(); ++ni) {
    const std::size_t n = c.n_list[ni];
    err_r[ni].assign(S, {});
    err_e[ni].assign(S, {});
    for (std::size_t rep = 0; rep < c.replicates; ++rep) {
      say(opt, "hydro: n=" + std::to_string(n) + " replicate " + std::to_string(rep + 1) + "/" +
                   std::to_string(c.replicates));
      const std::uint64_t root = ensemble_root(res.seed, n, rep);
      auto acc = run_ensemble(
          c.ensemble_size, opt.threads, c.block_size, [&] { return HydroAccumulator(S, n, E); },
          [&](HydroAccumulator& a, std::size_t i) {
            RandomStream rng = RandomStream::for_trajectory(root, i);
            FlipChainSimulator& sim = thread_simulator(n, c.gamma);
            sim.load(local_gibbs_sample(c.tau0, c.temperature0, n, rng));
            const auto ni64 = static_cast<std::int64_t>(n);
            std::vector<double> e(n);
            for (std::size_t s = 0; s < S; ++s) {
              sim.run_until(c.t_snapshots[s], rng);
              const ModeSpectrum m = sim.modes();
              const ChainState st = idft(m, c.t_snapshots[s]);
              for (std::size_t x = 0; x < n; ++x) {
                e[x] = 0.5 * (st.r[x] * st.r[x] + st.p[x] * st.p[x]);
                a.site_r[s * n + x].add(st.r[x]);
                a.site_e[s * n + x].add(e[x]);
              }
              const auto eh = dft(std::span<const double>(e));
              for (int eta = -E; eta <= E; ++eta) {
                const auto k = static_cast<std::size_t>(wrap_index(eta, ni64));
                const std::size_t idx = s * a.width + static_cast<std::size_t>(eta + E);
                a.coef_r[idx].add(m.r_hat[k] / static_cast<double>(n));
                a.coef_e[idx].add(eh[k] / static_cast<double>(n));
              }
            }
          });
      for (std::size_t s = 0; s < S; ++s) {
        const double t = c.t_snapshots[s];
        const std::span<const ComplexStats> cr(acc.coef_r.data() + s * acc.width, acc.width);
        const std::span<const ComplexStats> ce(acc.coef_e.data() + s * acc.width, acc.width);
        const ProfileError er = projected_l2_error(cr, E, pde_r[s]);
        const ProfileError ee = projected_l2_error(ce, E, pde_e[s]);
        std::vector<double> emp_r(n), emp_e(n), ref_r(n), ref_e(n);
        for (std::size_t x = 0; x < n; ++x) {
          const double u = static_cast<double>(x) / static_cast<double>(n);
          emp_r[x] = acc.site_r[s * n + x].mean();
          emp_e[x] = acc.site_e[s * n + x].mean();
          ref_r[x] = pde_r[s].eval(u);
          ref_e[x] = pde_e[s].eval(u);
        }
        const std::string coord = "replicate=" + std::to_string(rep);
        res.table.add(n, t, "l2_error_r", coord, er.l2, er.noise, 0.0);
        res.table.add(n, t, "l2_error_e", coord, ee.l2, ee.noise, 0.0);
        res.table.add(n, t, "block_error_r", coord, block_error(emp_r, ref_r, 16));
        res.table.add(n, t, "block_error_e", coord, block_error(emp_e, ref_e, 16));
        err_r[ni][s].push_back(er.l2);
        err_e[ni][s].push_back(ee.l2);
        if (rep == 0) {
          for (std::size_t x = 0; x < n; ++x) {
            const std::string xc = std::to_string(x);
            res.table.add(n, t, "r_site", xc, emp_r[x], acc.site_r[s * n + x].stderr_of_mean(), ref_r[x]);
            res.table.add(n, t, "e_site", xc, emp_e[x], acc.site_e[s * n + x].stderr_of_mean(), ref_e[x]);
          }
          if (n == c.n_list.back() && s + 1 == S) {
            SvgPlot pr{"elongation profile, n=" + std::to_string(n) + ", t=" + fmt(t), "u", "r", false, false, {}, {}};
            SvgPlot pe{"energy profile, n=" + std::to_string(n) + ", t=" + fmt(t), "u", "e", false, false, {}, {}};
            SvgSeries a{"empirical", {}, emp_r}, b{"PDE", {}, ref_r}, a2{"empirical", {}, emp_e}, b2{"PDE", {}, ref_e};
            for (std::size_t x = 0; x < n; ++x) {
              const double u = static_cast<double>(x) / static_cast<double>(n);
              a.x.push_back(u);
              b.x.push_back(u);
              a2.x.push_back(u);
              b2.x.push_back(u);
            }
            pr.series = {a, b};
            pe.series = {a2, b2};
            res.plots.emplace_back("profile_r.svg", pr);
            res.plots.emplace_back("profile_e.svg", pe);
          }
        }
      }
    }
    if (c.trajectory_dump)
      res.extra_files.emplace_back("trajectories/n" + std::to_string(n) + ".csv", trajectory_dump(c, res.seed, n));
  }

  // Medians over replicates, gates at the largest n, monotonicity at t_end.
  SvgPlot conv{"median L2 error at t=" + fmt(c.t_snapshots.back()), "n", "error", true, true, {}, {}};
  SvgSeries sr{"elongation", {}, {}}, se{"energy", {}, {}};
  nlohmann::json med = nlohmann::json::array();
  double worst_r = 0.0, worst_e = 0.0;
  for (std::size_t ni = 0; ni < c.n_list.size(); ++ni) {
    for (std::size_t s = 0; s < S; ++s) {
      const double mr = median(err_r[ni][s]), me = median(err_e[ni][s]);
      res.table.add(c.n_list[ni], c.t_snapshots[s], "median_l2_error_r", "", mr);
      res.table.add(c.n_list[ni], c.t_snapshots[s], "median_l2_error_e", "", me);
      med.push_back({{"n", c.n_list[ni]}, {"t", c.t_snapshots[s]}, {"r", mr}, {"e", me}});
      if (ni + 1 == c.n_list.size()) {
        worst_r = std::max(worst_r, mr);
        worst_e = std::max(worst_e, me);
      }
    }
    sr.x.push_back(static_cast<double>(c.n_list[ni]));
    sr.y.push_back(median(err_r[ni][S - 1]));
    se.x.push_back(static_cast<double>(c.n_list[ni]));
    se.y.push_back(median(err_e[ni][S - 1]));
  }
  conv.series = {sr, se};
  res.plots.emplace_back("convergence.svg", conv);
  res.summary["median_errors"] = med;

  const nlohmann::json gp = {{"n", c.n_list.back()}, {"replicates", c.replicates}, {"eta_max", E}};
  res.checks.push_back(scalar_record("elongation_l2_error", worst_r, 0.0, worst_r, c.tolerances.elongation_l2, gp));
  res.checks.back().note = "largest median error over snapshots at the largest n";
  res.checks.push_back(scalar_record("energy_l2_error", worst_e, 0.0, worst_e, c.tolerances.energy_l2, gp));
  res.checks.back().note = "largest median error over snapshots at the largest n";
  if (c.n_list.size() >= 2) {
    std::vector<std::size_t> order(c.n_list.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.n_list[a] < c.n_list[b]; });
    std::size_t violations = 0;
    nlohmann::json seq = nlohmann::json::array();
    for (std::size_t i = 0; i < order.size(); ++i) {
      const double m = median(err_r[order[i]][S - 1]);
      seq.push_back({{"n", c.n_list[order[i]]}, {"median", m}});
      if (i > 0 && !(m < median(err_r[order[i - 1]][S - 1]))) ++violations;
    }
    CheckRecord r = scalar_record("elongation_error_monotone", static_cast<double>(violations), 0.0,
                                  static_cast<double>(violations), 0.0, {{"t", c.t_snapshots.back()}, {"sequence", seq}});
    r.note = "number of n steps where the median error fails to decrease";
    res.checks.push_back(r);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Equilibrium stationarity.

struct EquilibriumAccumulator {
  std::size_t snaps = 0;
  std::vector<ScalarStats> mean_r, mean_p, mean_e;  // per snapshot, of per-trajectory spatial averages
  std::vector<std::vector<ModeSpectrum>> modes;     // [snapshot][trajectory in order]

  explicit EquilibriumAccumulator(std::size_t s) : snaps(s), mean_r(s), mean_p(s), mean_e(s), modes(s) {}

  void merge(const EquilibriumAccumulator& o) {
    for (std::size_t s = 0; s < snaps; ++s) {
      mean_r[s].merge(o.mean_r[s]);
      mean_p[s].merge(o.mean_p[s]);
      mean_e[s].merge(o.mean_e[s]);
      modes[s].insert(modes[s].end(), o.modes[s].begin(), o.modes[s].end());
    }
  }
};

inline ExperimentResult run_equilibrium(const ExperimentConfig& c, const RunOptions& opt, ExperimentResult res) {
  using namespace experiment_detail;
  const std::size_t S = c.t_snapshots.size();
  const double tau = c.tau0.coefficient(0).real();
  const double temp = c.temperature0.coefficient(0).real();
  const double beta = 1.0 / temp;
  const double sig = c.tolerances.sigma;
  for (std::size_t n : c.n_list) {
    say(opt, "equilibrium: n=" + std::to_string(n));
    const std::uint64_t root = ensemble_root(res.seed, n, 0);
    auto acc = run_ensemble(
        c.ensemble_size, opt.threads, c.block_size, [&] { return EquilibriumAccumulator(S); },
        [&](EquilibriumAccumulator& a, std::size_t i) {
          RandomStream rng = RandomStream::for_trajectory(root, i);
          FlipChainSimulator& sim = thread_simulator(n, c.gamma);
          sim.load(local_gibbs_sample(c.tau0, c.temperature0, n, rng));
          for (std::size_t s = 0; s < S; ++s) {
            sim.run_until(c.t_snapshots[s], rng);
            ModeSpectrum m = sim.modes();
            const ChainState st = idft(m, c.t_snapshots[s]);
            const double nn = static_cast<double>(n);
            a.mean_r[s].add(pairwise_sum(st.r) / nn);
            a.mean_p[s].add(pairwise_sum(st.p) / nn);
            a.mean_e[s].add(pairwise_sum(energy_per_site(st)) / nn);
            a.modes[s].push_back(std::move(m));
          }
        });
    SvgPlot sp{"thermal spectrum, n=" + std::to_string(n), "k", "u_n(k)", false, false, {}, {}};
    SvgPlot mp{"grid-averaged moments, n=" + std::to_string(n), "t", "value", false, false, {}, {}};
    SvgSeries sr{"E r", {}, {}}, spp{"E p", {}, {}}, se{"E E_x", {}, {}};
    for (std::size_t s = 0; s < S; ++s) {
      const double t = c.t_snapshots[s];
      const nlohmann::json p = {{"n", n}, {"t", t}, {"ensemble_size", c.ensemble_size}};
      const double er = thermo_r(tau, beta), ee = thermo_e(tau, beta);
      res.table.add(n, t, "mean_r", "", acc.mean_r[s].mean(), acc.mean_r[s].stderr_of_mean(), er);
      res.table.add(n, t, "mean_p", "", acc.mean_p[s].mean(), acc.mean_p[s].stderr_of_mean(), 0.0);
      res.table.add(n, t, "mean_e", "", acc.mean_e[s].mean(), acc.mean_e[s].stderr_of_mean(), ee);
      res.checks.push_back(ci_record("mean_r", p, acc.mean_r[s].mean(), er, acc.mean_r[s].stderr_of_mean(), sig));
      res.checks.push_back(ci_record("mean_p", p, acc.mean_p[s].mean(), 0.0, acc.mean_p[s].stderr_of_mean(), sig));
      res.checks.push_back(ci_record("mean_e", p, acc.mean_e[s].mean(), ee, acc.mean_e[s].stderr_of_mean(), sig));
      sr.x.push_back(t);
      spp.x.push_back(t);
      se.x.push_back(t);
      sr.y.push_back(acc.mean_r[s].mean());
      spp.y.push_back(acc.mean_p[s].mean());
      se.y.push_back(acc.mean_e[s].mean());

      const SpectrumReport spec = thermal_spectrum_from_modes(acc.modes[s]);
      double worst = 0.0;
      std::size_t worst_j = 0;
      SvgSeries su{"t=" + fmt(t), {}, {}};
      for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(j) / static_cast<double>(n);
        res.table.add(n, t, "u", std::to_string(j), spec.u[j], spec.u_stderr[j], temp);
        const double z = std::abs(spec.u[j] - temp) / spec.u_stderr[j];
        if (z > worst) {
          worst = z;
          worst_j = j;
        }
        su.x.push_back(k);
        su.y.push_back(spec.u[j]);
      }
      sp.series.push_back(su);
      CheckRecord r = scalar_record("flat_spectrum", worst, 0.0, worst, c.tolerances.spectrum_sigma,
                                    {{"n", n}, {"t", t}, {"worst_k_index", worst_j}, {"temperature", temp}});
      r.note = "max over k of |u_n(k) - temperature| in per-k standard errors";
      res.checks.push_back(r);
    }
    mp.series = {sr, spp, se};
    res.plots.emplace_back("spectrum_n" + std::to_string(n) + ".svg", sp);
    res.plots.emplace_back("moments_n" + std::to_string(n) + ".svg", mp);
    if (c.trajectory_dump)
      res.extra_files.emplace_back("trajectories/n" + std::to_string(n) + ".csv", trajectory_dump(c, res.seed, n));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Matrix verification.

inline ExperimentResult run_matrix_verify(const ExperimentConfig& c, const RunOptions& opt, ExperimentResult res) {
  using namespace experiment_detail;
  MatrixSuiteOptions mo;
  mo.samples = c.matrix.samples;
  mo.seed = res.seed;
  mo.n_max = c.matrix.n_max;
  mo.lambda = c.matrix.lambda;
  mo.eta = c.matrix.eta;
  mo.gamma = c.matrix.gamma;
  mo.xi = c.matrix.xi;
  mo.sweep_ns.assign(c.n_list.begin(), c.n_list.end());
  std::sort(mo.sweep_ns.begin(), mo.sweep_ns.end());
  mo.det_tol = c.tolerances.det;
  mo.inverse_tol = c.tolerances.inverse;
  mo.z0_samples = c.matrix.z0_samples;
  mo.z0_n = c.matrix.z0_n;
  mo.rho = c.rho;
  say(opt, "matrix_verify: identities and limit sweeps");
  res.checks = matrix_verification_suite(mo);
  MeanSystemOptions ms;
  ms.gamma = c.gamma;
  ms.lambda = c.lambdas.front();
  ms.residual_tol = c.tolerances.residual;
  ms.pairing_tol = c.tolerances.pairing;
  say(opt, "matrix_verify: mean system");
  for (auto& r : mean_system_suite(ms)) res.checks.push_back(std::move(r));

  SvgPlot conv{"limit sweeps", "n", "error", true, true, {}, {}};
  for (const auto& r : res.checks) {
    res.table.add(0, 0.0, r.check_id, "", r.rel_err, std::numeric_limits<double>::quiet_NaN(),
                  r.tolerance ? *r.tolerance : std::numeric_limits<double>::quiet_NaN());
    if (r.params.contains("sweep")) {
      SvgSeries s{r.check_id, {}, {}};
      for (const auto& p : r.params["sweep"]) {
        const auto n = p["n"].get<std::int64_t>();
        const double e = p["error"].get<double>();
        res.table.add(static_cast<std::size_t>(n), 0.0, r.check_id + "_error", "", e);
        s.x.push_back(static_cast<double>(n));
        s.y.push_back(e);
      }
      conv.series.push_back(s);
    }
  }
  res.plots.emplace_back("limit_sweeps.svg", conv);
  return res;
}

// ---------------------------------------------------------------------------
// Local equilibrium through Laplace-Wigner pairings.

// Test functions G(u, v) = exp(2 pi i eta u) h(v) with h = 1 and h = 1 + cos(2 pi v).
inline double le_profile(int g, double v) { return g == 0 ? 1.0 : 1.0 + std::cos(kTwoPi * v); }
inline double le_profile_mean(int) { return 1.0; }
inline constexpr int kLeProfiles = 2;

struct WignerLeAccumulator {
  std::size_t lambdas = 0, etas = 0, grid = 0;
  std::vector<ComplexStats> fine, diff;  // [lambda][eta][g]
  std::vector<ComplexStats> series;      // [grid point][eta][g]

  WignerLeAccumulator(std::size_t l, std::size_t e, std::size_t g)
      : lambdas(l), etas(e), grid(g), fine(l * e * kLeProfiles), diff(l * e * kLeProfiles),
        series(g * e * kLeProfiles) {}

  void merge(const WignerLeAccumulator& o) {
    for (std::size_t i = 0; i < fine.size(); ++i) {
      fine[i].merge(o.fine[i]);
      diff[i].merge(o.diff[i]);
    }
    for (std::size_t i = 0; i < series.size(); ++i) series[i].merge(o.series[i]);
  }
};

inline LaplaceQuadrature wigner_le_quadrature(const ExperimentConfig& c) {
  const double lmin = *std::min_element(c.lambdas.begin(), c.lambdas.end());
  const double lmax = *std::max_element(c.lambdas.begin(), c.lambdas.end());
  const double horizon = c.laplace_horizon > 0.0 ? c.laplace_horizon : 8.0 / lmin;
  std::vector<double> grid;
  if (c.laplace_dt > 0.0) {
    auto intervals = static_cast<std::size_t>(std::ceil(horizon / c.laplace_dt - 1e-9));
    if (intervals % 2) ++intervals;
    grid = uniform_grid(horizon, intervals);
  } else {
    grid = default_laplace_grid(horizon, lmax);
  }
  return LaplaceQuadrature(std::move(grid), c.lambdas);
}

inline ExperimentResult run_wigner_le(const ExperimentConfig& c, const RunOptions& opt, ExperimentResult res) {
  using namespace experiment_detail;
  const LaplaceQuadrature quad = wigner_le_quadrature(c);
  const auto& grid = quad.grid();
  const std::size_t L = c.lambdas.size();
  const auto E = static_cast<std::size_t>(c.eta_max) + 1;  // eta = 0..eta_max
  const double sig = c.tolerances.sigma;
  res.summary["laplace_horizon"] = quad.horizon();
  res.summary["laplace_intervals"] = grid.size() - 1;
  for (std::size_t n : c.n_list) {
    say(opt, "wigner_le: n=" + std::to_string(n) + ", " + std::to_string(grid.size() - 1) + " time steps");
    const std::uint64_t root = ensemble_root(res.seed, n, 0);
    const auto ni = static_cast<std::int64_t>(n);
    std::vector<double> hv[kLeProfiles];
    for (int g = 0; g < kLeProfiles; ++g)
      for (std::size_t j = 0; j < n; ++j) hv[g].push_back(le_profile(g, static_cast<double>(j) / static_cast<double>(n)));
    auto acc = run_ensemble(
        c.ensemble_size, opt.threads, c.block_size, [&] { return WignerLeAccumulator(L, E, grid.size()); },
        [&](WignerLeAccumulator& a, std::size_t i) {
          RandomStream rng = RandomStream::for_trajectory(root, i);
          FlipChainSimulator& sim = thread_simulator(n, c.gamma);
          sim.load(local_gibbs_sample(c.tau0, c.temperature0, n, rng));
          std::vector<cplx> psi(n);
          std::vector<cplx> fine(L * E * kLeProfiles, 0.0), coarse(L * E * kLeProfiles, 0.0);
          const double inv = 1.0 / (2.0 * static_cast<double>(n) * static_cast<double>(n));
          for (std::size_t ti = 0; ti < grid.size(); ++ti) {
            sim.run_until(grid[ti], rng);
            sim.psi_hat(psi);
            for (std::size_t e = 0; e < E; ++e) {
              cplx p[kLeProfiles] = {0.0, 0.0};
              for (std::size_t j = 0; j < n; ++j) {
                const cplx w = psi[static_cast<std::size_t>(wrap_index(static_cast<std::int64_t>(j + e), ni))] *
                               std::conj(psi[j]);
                for (int g = 0; g < kLeProfiles; ++g) p[g] += w * hv[g][j];
              }
              for (int g = 0; g < kLeProfiles; ++g) {
                const cplx v = p[g] * inv;  // n^-1 sum_k W+(eta, k) h(k)
                a.series[(ti * E + e) * kLeProfiles + g].add(v);
                for (std::size_t l = 0; l < L; ++l) {
                  const std::size_t idx = (l * E + e) * kLeProfiles + g;
                  fine[idx] += quad.weights(l)[ti] * v;
                  coarse[idx] += quad.coarse_weights(l)[ti] * v;
                }
              }
            }
          }
          for (std::size_t idx = 0; idx < fine.size(); ++idx) {
            a.fine[idx].add(fine[idx]);
            a.diff[idx].add(fine[idx] - coarse[idx]);
          }
        });

    // Deterministic references: macroscopic targets and the exact finite-n expectation.
    const WignerField v0 = discrete_profile_wigner(c.tau0, n, c.eta_max)
                               .combine(1.0, local_gibbs_fluctuation_wigner(c.temperature0, n, c.eta_max), 1.0);
    for (std::size_t l = 0; l < L; ++l) {
      const double lambda = c.lambdas[l];
      const WignerField exact = exact_laplace_wigner(v0, lambda, c.gamma);
      for (std::size_t e = 0; e < E; ++e) {
        const int eta = static_cast<int>(e);
        const LaplaceTargets tg = mech_thermal_laplace_targets(c.tau0, c.temperature0, c.gamma, lambda, eta);
        for (int g = 0; g < kLeProfiles; ++g) {
          const std::size_t idx = (l * E + e) * kLeProfiles + g;
          double sup = 0.0;
          for (std::size_t ti = 0; ti < grid.size(); ++ti)
            sup = std::max(sup, std::abs(acc.series[(ti * E + e) * kLeProfiles + g].mean()));
          const cplx target = tg.thermal * le_profile_mean(g) + tg.mech * le_profile(g, 0.0);
          const cplx obs = acc.fine[idx].mean();
          const double se = acc.fine[idx].stderr_abs();
          const double quad_budget = std::abs(acc.diff[idx].mean()) / 3.0;
          const double tail = sup * quad.tail_factor(l);
          const cplx ex = pair_with_test_function(
              exact, TestFunction::single_mode(eta, [g](double v) { return le_profile(g, v); }));
          const std::string id = "laplace_pairing_h" + std::to_string(g);
          const std::string coord = "lambda=" + fmt(lambda) + ";eta=" + std::to_string(eta);
          res.table.add(n, quad.horizon(), id + "_re", coord, obs.real(), acc.fine[idx].stderr_re(), target.real());
          res.table.add(n, quad.horizon(), id + "_im", coord, obs.imag(), acc.fine[idx].stderr_im(), target.imag());
          res.table.add(n, quad.horizon(), id + "_exact_re", coord, ex.real(), std::numeric_limits<double>::quiet_NaN(),
                        target.real());
          res.table.add(n, quad.horizon(), id + "_exact_im", coord, ex.imag(), std::numeric_limits<double>::quiet_NaN(),
                        target.imag());
          CheckRecord r;
          r.check_id = id;
          r.params = {{"n", n},
                      {"lambda", lambda},
                      {"eta", eta},
                      {"h", g == 0 ? "1" : "1 + cos(2 pi v)"},
                      {"ensemble_size", c.ensemble_size},
                      {"stderr", se},
                      {"sigma", sig},
                      {"quadrature_budget", quad_budget},
                      {"tail_bound", tail},
                      {"w_thm", complex_json(tg.thermal)},
                      {"w_mech", complex_json(tg.mech)},
                      {"exact_finite_n", complex_json(ex)},
                      {"exact_bias", std::abs(ex - target)}};
          r.observed = complex_json(obs);
          r.predicted = complex_json(target);
          r.rel_err = std::abs(obs - target);
          r.tolerance = sig * se + quad_budget + tail;
          r.note = "statistical gate: |observed - target| within sigma stderr plus quadrature and tail budget";
          res.checks.push_back(r);
        }
      }
    }
    // Time series of the paired Wigner functions (before the transform).
    SvgPlot ts{"paired W+ time series, n=" + std::to_string(n), "t", "Re pairing", false, false, {}, {}};
    for (std::size_t e = 0; e < E; ++e)
      for (int g = 0; g < kLeProfiles; ++g) {
        SvgSeries s{"eta=" + std::to_string(e) + ",h" + std::to_string(g), {}, {}};
        const std::size_t stride = std::max<std::size_t>(1, grid.size() / 400);
        for (std::size_t ti = 0; ti < grid.size(); ti += stride) {
          s.x.push_back(grid[ti]);
          s.y.push_back(acc.series[(ti * E + e) * kLeProfiles + g].mean().real());
        }
        ts.series.push_back(s);
      }
    res.plots.emplace_back("wigner_series_n" + std::to_string(n) + ".svg", ts);
  }
  return res;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& opt) {
  validate(c);
  ExperimentResult res;
  res.config = c;
  res.seed = opt.seed ? *opt.seed : c.seed;
  res.estimated_events = estimate_events(c);
  experiment_detail::say(opt, "estimated flip events: " + experiment_detail::fmt(res.estimated_events));
  if (opt.max_events && res.estimated_events > *opt.max_events)
    throw BudgetError("estimated event count " + experiment_detail::fmt(res.estimated_events) +
                      " exceeds --max-events " + experiment_detail::fmt(*opt.max_events));
  switch (c.kind) {
    case ExperimentKind::Hydro: return run_hydro(c, opt, std::move(res));
    case ExperimentKind::Equilibrium: return run_equilibrium(c, opt, std::move(res));
    case ExperimentKind::MatrixVerify: return run_matrix_verify(c, opt, std::move(res));
    case ExperimentKind::WignerLe: return run_wigner_le(c, opt, std::move(res));
  }
  return res;
}

// Writes results.csv, report.json, plots/*.svg and any extra files.
inline void write_outputs(const ExperimentResult& res, const std::filesystem::path& dir, bool deterministic) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "plots");
  {
    std::ofstream f(dir / "results.csv");
    res.table.write_csv(f);
  }
  {
    std::ofstream f(dir / "report.json");
    f << res.report().dump(2) << '\n';
  }
  std::string stamp;
  if (!deterministic) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "generated %Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    stamp = buf;
  }
  for (const auto& [name, plot] : res.plots) {
    SvgPlot p = plot;
    p.comment = stamp;
    std::ofstream f(dir / "plots" / name);
    f << p.render();
  }
  for (const auto& [name, text] : res.extra_files) {
    const fs::path p = dir / name;
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    f << text;
  }
}

}  // namespace hydrochain
