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

// Command-line front end: runs declarative experiments and the matrix suite.
// Exit codes: 0 all gates pass, 1 a tolerance gate failed, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "hydrochain/experiment.hpp"

namespace {

using namespace hydrochain;

void print_checks(const ExperimentResult& res) {
  for (const auto& c : res.checks) {
    if (!c.gated()) continue;
    std::cout << (c.passed() ? "PASS " : "FAIL ") << c.check_id;
    if (c.params.contains("n")) std::cout << " n=" << c.params["n"];
    if (c.params.contains("t")) std::cout << " t=" << c.params["t"];
    if (c.params.contains("lambda") && c.params.contains("eta"))
      std::cout << " lambda=" << c.params["lambda"] << " eta=" << c.params["eta"];
    std::cout << "  value=" << c.rel_err;
    if (c.tolerance) std::cout << " tol=" << *c.tolerance;
    if (c.conv_order) std::cout << " order=" << *c.conv_order;
    std::cout << '\n';
  }
}

std::filesystem::path output_dir(const ExperimentConfig& c) {
  if (const char* env = std::getenv("HYDROCHAIN_OUT"); env && *env) return env;
  return c.output_dir;
}

int finish(const ExperimentResult& res, bool deterministic) {
  const auto dir = output_dir(res.config);
  write_outputs(res, dir, deterministic);
  print_checks(res);
  std::cout << (res.passed() ? "all gates passed" : "some gates failed") << "; outputs in " << dir.string() << '\n';
  return res.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrochain: velocity-flip harmonic chain laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> max_events;
  bool deterministic = true;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run an experiment described by a YAML config");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--max-events", max_events, "Abort if the estimated flip count exceeds this");
  run->add_flag("--deterministic,!--no-deterministic", deterministic,
                "Byte-stable outputs (default on); off embeds a timestamp in SVG files");
  run->add_flag("--quiet", quiet, "Suppress progress messages");

  std::string preset = "default";
  std::string out_dir = "verify_matrix_out";
  auto* vm = app.add_subcommand("verify-matrix", "Run the matrix identity and limit suite");
  vm->add_option("--preset", preset, "Parameter preset")->check(CLI::IsMember({"default", "quick"}));
  vm->add_option("--output-dir", out_dir, "Directory for results (HYDROCHAIN_OUT overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunOptions opt;
  opt.threads = threads;
  opt.seed = seed;
  opt.max_events = max_events;
  opt.deterministic = deterministic;
  if (!quiet) opt.log = [](const std::string& m) { std::cerr << "[hydrochain] " << m << '\n'; };

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      return finish(run_experiment(cfg, opt), deterministic);
    }
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::MatrixVerify;
    cfg.description = "verify-matrix preset " + preset;
    cfg.output_dir = out_dir;
    cfg.seed = 20260101;
    if (preset == "quick") {
      cfg.n_list = {16, 32, 64, 128, 256};
      cfg.matrix.samples = 200;
    } else {
      for (std::size_t n = 16; n <= 4096; n *= 2) cfg.n_list.push_back(n);
      cfg.matrix.samples = 1000;
      cfg.matrix.z0_samples = 1000;
    }
    return finish(run_experiment(cfg, opt), true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "resource budget exceeded: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
