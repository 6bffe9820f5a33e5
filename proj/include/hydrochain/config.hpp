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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hydrochain/profile.hpp"

namespace hydrochain {

// Invalid experiment description; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ExperimentKind { Hydro, Equilibrium, MatrixVerify, WignerLe };

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Hydro: return "hydro";
    case ExperimentKind::Equilibrium: return "equilibrium";
    case ExperimentKind::MatrixVerify: return "matrix_verify";
    case ExperimentKind::WignerLe: return "wigner_le";
  }
  return "?";
}

inline constexpr int kConfigVersion = 1;

struct Tolerances {
  double elongation_l2 = 0.05;  // hydro: L2 error of r at the largest n
  double energy_l2 = 0.1;       // hydro: L2 error of e at the largest n
  double sigma = 4.0;           // equilibrium and wigner_le CI width in standard errors
  double spectrum_sigma = 5.0;  // equilibrium: per-k width of the flat-spectrum check
  double det = 1e-9;
  double inverse = 1e-8;
  double residual = 1e-6;
  double pairing = 1e-4;
};

struct MatrixSettings {
  std::size_t samples = 1000;
  std::int64_t n_max = 1024;
  double lambda = 5.0;
  int eta = 1;
  double gamma = 1.0;
  int xi = 2;
  std::size_t z0_samples = 0;
  std::size_t z0_n = 256;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  ExperimentKind kind = ExperimentKind::Hydro;
  std::string description;
  std::vector<std::size_t> n_list;
  double gamma = 1.0;
  std::size_t ensemble_size = 100;
  std::size_t replicates = 1;
  double t_end = 0.0;
  std::vector<double> t_snapshots;
  MacroProfile tau0 = MacroProfile::constant(1.0);
  std::string tau0_spec = "constant 1";
  MacroProfile temperature0 = MacroProfile::constant(1.0);
  std::string temperature0_spec = "constant 1";
  int eta_max = 2;
  std::vector<double> lambdas = {10.0};
  double rho = 0.25;
  int n_modes = 32;
  std::uint64_t seed = 1;
  std::string output_dir = "hydrochain_out";
  double laplace_horizon = 0.0;  // wigner_le; 0 means 8 / min(lambdas)
  double laplace_dt = 0.0;       // wigner_le; 0 means the default grid
  std::size_t block_size = 16;
  bool trajectory_dump = false;
  Tolerances tolerances;
  MatrixSettings matrix;
};

namespace config_detail {

inline void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, const T& fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

inline MacroProfile parse_profile(const YAML::Node& node, const std::string& where, std::string& spec) {
  if (!node.IsMap()) throw ConfigError(where + " must be a profile mapping with a 'type'");
  const auto type = get<std::string>(node, "type", "");
  std::ostringstream os;
  MacroProfile p;
  if (type == "constant") {
    check_keys(node, {"type", "value"}, where);
    const auto v = get<double>(node, "value", 0.0);
    os << "constant " << v;
    p = MacroProfile::constant(v);
  } else if (type == "cosine") {
    check_keys(node, {"type", "mean", "amplitude", "mode"}, where);
    const auto mean = get<double>(node, "mean", 0.0);
    const auto amp = get<double>(node, "amplitude", 0.0);
    const auto mode = get<int>(node, "mode", 1);
    if (mode < 0) throw ConfigError(where + ": mode must be nonnegative");
    os << mean << " + " << amp << " cos(2 pi " << mode << " u)";
    p = MacroProfile::cosine(mean, amp, mode);
  } else if (type == "fourier") {
    check_keys(node, {"type", "coefficients"}, where);
    const YAML::Node cs = node["coefficients"];
    if (!cs || !cs.IsSequence() || cs.size() == 0)
      throw ConfigError(where + ": fourier profile needs a nonempty 'coefficients' list");
    std::vector<cplx> c;
    for (const auto& e : cs) {
      if (e.IsSequence()) {
        if (e.size() != 2) throw ConfigError(where + ": complex coefficient must be [re, im]");
        c.emplace_back(e[0].as<double>(), e[1].as<double>());
      } else {
        c.emplace_back(e.as<double>(), 0.0);
      }
    }
    os << "fourier degree " << c.size() - 1;
    try {
      p = MacroProfile::from_coefficients(std::move(c));
    } catch (const Error& err) {
      throw ConfigError(where + ": " + err.what());
    }
  } else if (type == "smoothed_step") {
    check_keys(node, {"type", "low", "high", "terms"}, where);
    const auto lo = get<double>(node, "low", 0.0);
    const auto hi = get<double>(node, "high", 1.0);
    const auto terms = get<int>(node, "terms", 8);
    if (terms < 1) throw ConfigError(where + ": terms must be >= 1");
    os << "smoothed step " << lo << " -> " << hi << " (" << terms << " modes)";
    p = MacroProfile::smoothed_step(lo, hi, terms);
  } else {
    throw ConfigError(where + ": unknown profile type '" + type + "'");
  }
  spec = os.str();
  return p;
}

}  // namespace config_detail

// Checks the cross-field invariants. Throws ConfigError.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.version != kConfigVersion) fail("unsupported config version " + std::to_string(c.version));
  if (c.n_list.empty()) fail("n_list must not be empty");
  const std::size_t nmin = *std::min_element(c.n_list.begin(), c.n_list.end());
  if (nmin < 2) fail("every n in n_list must be at least 2");
  if (!(c.gamma > 0.0)) fail("gamma must be positive");
  if (c.eta_max < 0) fail("eta_max must be nonnegative");
  if (2 * static_cast<std::size_t>(c.eta_max) >= nmin) fail("need 2 eta_max < min(n_list)");
  if (c.block_size == 0) fail("block_size must be positive");
  if (c.kind == ExperimentKind::MatrixVerify) {
    if (c.n_list.size() < 2) fail("matrix_verify needs at least two sweep sizes in n_list");
    for (auto n : c.n_list)
      if (n % 4) fail("matrix_verify sweep sizes must be multiples of 4");
    if (c.matrix.samples == 0) fail("matrix.samples must be positive");
    if (c.matrix.n_max < 2) fail("matrix.n_max must be at least 2");
    if (!(c.matrix.lambda > 0.0) || !(c.matrix.gamma > 0.0)) fail("matrix lambda and gamma must be positive");
    return;
  }
  if (c.ensemble_size < 2) fail("ensemble_size must be at least 2");
  if (c.replicates < 1) fail("replicates must be at least 1");
  if (c.temperature0.min_on_grid(std::max<std::size_t>(4096, 8 * nmin)) <= 0.0)
    fail("temperature0 must be positive");
  if (c.kind == ExperimentKind::WignerLe) {
    if (c.lambdas.empty()) fail("lambdas must not be empty");
    for (double l : c.lambdas)
      if (!(l > 0.0)) fail("lambdas must be positive");
    if (c.laplace_horizon < 0.0 || c.laplace_dt < 0.0) fail("laplace horizon and dt must be nonnegative");
    if (c.eta_max < 1) fail("wigner_le needs eta_max >= 1");
    if (!(c.rho > 0.0 && c.rho < 0.5)) fail("rho must lie in (0, 1/2)");
    return;
  }
  if (!(c.t_end > 0.0)) fail("t_end must be positive");
  if (c.t_snapshots.empty()) fail("t_snapshots must not be empty");
  for (double t : c.t_snapshots)
    if (t < 0.0 || t > c.t_end) fail("t_snapshots must lie in [0, t_end]");
  if (!std::is_sorted(c.t_snapshots.begin(), c.t_snapshots.end())) fail("t_snapshots must be increasing");
  if (c.kind == ExperimentKind::Hydro && c.n_modes < 2 * c.tau0.degree() + 2)
    fail("n_modes must be at least 2 deg(tau0) + 2");
  if (c.kind == ExperimentKind::Equilibrium && (c.tau0.degree() != 0 || c.temperature0.degree() != 0))
    fail("equilibrium runs need constant tau0 and temperature0");
}

inline ExperimentConfig parse_config(const YAML::Node& root) {
  using namespace config_detail;
  check_keys(root, {"version", "kind", "description", "n_list", "gamma", "ensemble_size", "replicates", "t_end",
                    "t_snapshots", "tau0", "temperature0", "eta_max", "lambdas", "rho", "n_modes", "seed",
                    "output_dir", "laplace", "tolerances", "block_size", "trajectory_dump", "matrix"},
             "config");
  ExperimentConfig c;
  if (!root["version"]) throw ConfigError("missing schema field 'version'");
  c.version = get<int>(root, "version", 0);
  const auto kind = get<std::string>(root, "kind", "");
  if (kind == "hydro")
    c.kind = ExperimentKind::Hydro;
  else if (kind == "equilibrium")
    c.kind = ExperimentKind::Equilibrium;
  else if (kind == "matrix_verify")
    c.kind = ExperimentKind::MatrixVerify;
  else if (kind == "wigner_le")
    c.kind = ExperimentKind::WignerLe;
  else
    throw ConfigError("kind must be one of hydro, equilibrium, matrix_verify, wigner_le");
  c.description = get<std::string>(root, "description", "");
  c.n_list = get<std::vector<std::size_t>>(root, "n_list", {});
  c.gamma = get<double>(root, "gamma", c.gamma);
  c.ensemble_size = get<std::size_t>(root, "ensemble_size", c.ensemble_size);
  c.replicates = get<std::size_t>(root, "replicates", c.replicates);
  c.t_end = get<double>(root, "t_end", c.t_end);
  c.t_snapshots = get<std::vector<double>>(root, "t_snapshots", {});
  if (c.t_snapshots.empty() && c.t_end > 0.0) c.t_snapshots = {0.0, c.t_end};
  if (root["tau0"]) c.tau0 = parse_profile(root["tau0"], "tau0", c.tau0_spec);
  if (root["temperature0"]) c.temperature0 = parse_profile(root["temperature0"], "temperature0", c.temperature0_spec);
  c.eta_max = get<int>(root, "eta_max", c.eta_max);
  c.lambdas = get<std::vector<double>>(root, "lambdas", c.lambdas);
  c.rho = get<double>(root, "rho", c.rho);
  c.n_modes = get<int>(root, "n_modes", c.n_modes);
  c.seed = get<std::uint64_t>(root, "seed", c.seed);
  c.output_dir = get<std::string>(root, "output_dir", c.output_dir);
  c.block_size = get<std::size_t>(root, "block_size", c.block_size);
  c.trajectory_dump = get<bool>(root, "trajectory_dump", c.trajectory_dump);
  if (const auto l = root["laplace"]) {
    check_keys(l, {"horizon", "dt"}, "laplace");
    c.laplace_horizon = get<double>(l, "horizon", 0.0);
    c.laplace_dt = get<double>(l, "dt", 0.0);
  }
  if (const auto t = root["tolerances"]) {
    check_keys(t, {"elongation_l2", "energy_l2", "sigma", "spectrum_sigma", "det", "inverse", "residual", "pairing"},
               "tolerances");
    auto& o = c.tolerances;
    o.elongation_l2 = get<double>(t, "elongation_l2", o.elongation_l2);
    o.energy_l2 = get<double>(t, "energy_l2", o.energy_l2);
    o.sigma = get<double>(t, "sigma", o.sigma);
    o.spectrum_sigma = get<double>(t, "spectrum_sigma", o.spectrum_sigma);
    o.det = get<double>(t, "det", o.det);
    o.inverse = get<double>(t, "inverse", o.inverse);
    o.residual = get<double>(t, "residual", o.residual);
    o.pairing = get<double>(t, "pairing", o.pairing);
  }
  if (const auto m = root["matrix"]) {
    check_keys(m, {"samples", "n_max", "lambda", "eta", "gamma", "xi", "z0_samples", "z0_n"}, "matrix");
    auto& o = c.matrix;
    o.samples = get<std::size_t>(m, "samples", o.samples);
    o.n_max = get<std::int64_t>(m, "n_max", o.n_max);
    o.lambda = get<double>(m, "lambda", o.lambda);
    o.eta = get<int>(m, "eta", o.eta);
    o.gamma = get<double>(m, "gamma", o.gamma);
    o.xi = get<int>(m, "xi", o.xi);
    o.z0_samples = get<std::size_t>(m, "z0_samples", o.z0_samples);
    o.z0_n = get<std::size_t>(m, "z0_n", o.z0_n);
  }
  validate(c);
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file " + path);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(root);
}

}  // namespace hydrochain
