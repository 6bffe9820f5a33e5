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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hydrochain/experiment.hpp"

namespace hydrochain {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Every output file of a run, keyed by relative path.
std::map<std::string, std::string> run_to_files(const ExperimentConfig& c, unsigned threads, const std::string& tag) {
  RunOptions o;
  o.threads = threads;
  const ExperimentResult res = run_experiment(c, o);
  const auto dir = std::filesystem::path(::testing::TempDir()) / ("hydrochain_" + tag);
  std::filesystem::remove_all(dir);
  write_outputs(res, dir, true);
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

const char* kTinyHydro = R"(
version: 1
kind: hydro
n_list: [16, 32]
ensemble_size: 40
replicates: 2
t_end: 0.01
t_snapshots: [0.0, 0.01]
tau0: {type: cosine, mean: 1.0, amplitude: 0.5, mode: 1}
temperature0: {type: constant, value: 1.0}
eta_max: 2
n_modes: 8
block_size: 7
seed: 11
)";

const char* kTinyEquilibrium = R"(
version: 1
kind: equilibrium
n_list: [16]
ensemble_size: 50
t_end: 0.01
tau0: {type: constant, value: 0.5}
temperature0: {type: constant, value: 2.0}
eta_max: 1
block_size: 8
seed: 5
)";

const char* kTinyWignerLe = R"(
version: 1
kind: wigner_le
n_list: [16]
ensemble_size: 30
tau0: {type: cosine, mean: 1.0, amplitude: 0.5, mode: 1}
temperature0: {type: cosine, mean: 1.0, amplitude: 0.25, mode: 1}
eta_max: 1
lambdas: [10.0, 20.0]
laplace: {horizon: 0.8, dt: 0.004}
block_size: 4
seed: 9
)";

// ---------------------------------------------------------------------------
// Config parsing.

TEST(Config, ParsesSampleConfigs) {
  for (const char* name : {"hydro_cosine.yaml", "equilibrium.yaml", "matrix_verify.yaml", "wigner_le.yaml",
                           "wigner_le_small.yaml"}) {
    const ExperimentConfig c = load_config(std::string(HYDROCHAIN_SOURCE_DIR) + "/configs/" + name);
    EXPECT_FALSE(c.n_list.empty()) << name;
  }
}

TEST(Config, ProfilesAndDefaults) {
  const ExperimentConfig c = parse_config_string(R"(
version: 1
kind: hydro
n_list: [32]
t_end: 0.1
tau0: {type: fourier, coefficients: [1.0, [0.25, 0.1]]}
temperature0: {type: smoothed_step, low: 0.5, high: 1.5, terms: 3}
)");
  EXPECT_EQ(c.ensemble_size, 100u);
  EXPECT_EQ(c.t_snapshots, (std::vector<double>{0.0, 0.1}));
  EXPECT_EQ(c.tau0.coefficient(1), cplx(0.25, 0.1));
  EXPECT_EQ(c.tau0.coefficient(-1), cplx(0.25, -0.1));
  EXPECT_GT(c.temperature0.min_on_grid(1024), 0.0);
  EXPECT_EQ(c.temperature0.degree(), 3);
}

TEST(Config, Rejections) {
  const std::string base = "version: 1\nkind: hydro\nt_end: 0.1\n";
  auto bad = [&](const std::string& extra) {
    EXPECT_THROW(parse_config_string(base + extra), ConfigError) << extra;
  };
  bad("n_list: []\n");
  bad("n_list: [1]\n");
  bad("n_list: [16]\neta_max: 8\n");
  bad("n_list: [16]\nensemble_size: 1\n");
  bad("n_list: [16]\nbogus: 3\n");
  bad("n_list: [16]\ntau0: {type: cosine, mean: 1, amplitude: 1, mode: 1, phase: 2}\n");
  bad("n_list: [16]\ntau0: {type: triangle}\n");
  bad("n_list: [16]\ntemperature0: {type: cosine, mean: 0.5, amplitude: 1.0, mode: 1}\n");
  bad("n_list: [16]\nt_snapshots: [0.05, 0.01]\n");
  bad("n_list: [16]\nt_snapshots: [0.2]\n");
  bad("n_list: [16]\ntolerances: {sigmaa: 3}\n");
  bad("n_list: [16]\n: [\n");
  EXPECT_THROW(parse_config_string("kind: hydro\nn_list: [16]\nt_end: 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 2\nkind: hydro\nn_list: [16]\nt_end: 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 1\nkind: sprint\nn_list: [16]\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 1\nkind: matrix_verify\nn_list: [16, 30]\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 1\nkind: matrix_verify\nn_list: [16]\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 1\nkind: wigner_le\nn_list: [16]\neta_max: 0\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version: 1\nkind: wigner_le\nn_list: [16]\nrho: 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config_string(
                   "version: 1\nkind: equilibrium\nn_list: [16]\nt_end: 0.1\n"
                   "tau0: {type: cosine, mean: 1, amplitude: 1, mode: 1}\n"),
               ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), ConfigError);
}

// ---------------------------------------------------------------------------
// Runs.

TEST(Experiment, OutputsIndependentOfThreadCount) {
  for (const char* text : {kTinyHydro, kTinyEquilibrium, kTinyWignerLe}) {
    const ExperimentConfig c = parse_config_string(text);
    const auto one = run_to_files(c, 1, "t1");
    const auto three = run_to_files(c, 3, "t3");
    ASSERT_EQ(one.size(), three.size()) << kind_name(c.kind);
    EXPECT_TRUE(one.count("results.csv") && one.count("report.json"));
    for (const auto& [name, bytes] : one) EXPECT_EQ(bytes, three.at(name)) << kind_name(c.kind) << " " << name;
  }
}

TEST(Experiment, SeedControlsTheRun) {
  const ExperimentConfig c = parse_config_string(kTinyEquilibrium);
  RunOptions o;
  std::ostringstream a, b, d;
  run_experiment(c, o).table.write_csv(a);
  run_experiment(c, o).table.write_csv(b);
  o.seed = 6;
  const ExperimentResult other = run_experiment(c, o);
  other.table.write_csv(d);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), d.str());
  EXPECT_EQ(other.seed, 6u);
  EXPECT_EQ(other.report()["seed"].get<std::uint64_t>(), 6u);
}

TEST(Experiment, CsvSchema) {
  const ExperimentResult res = run_experiment(parse_config_string(kTinyEquilibrium), RunOptions{});
  std::ostringstream os;
  res.table.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n,t,quantity,coord,value,stderr,reference");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  }
  EXPECT_EQ(rows, res.table.rows().size());
  EXPECT_GT(rows, 0u);
  EXPECT_EQ(ResultsTable::num(std::numeric_limits<double>::quiet_NaN()), "");
  EXPECT_EQ(std::stod(ResultsTable::num(0.1)), 0.1);
}

TEST(Experiment, ReportListsChecks) {
  const ExperimentResult res = run_experiment(parse_config_string(kTinyWignerLe), RunOptions{});
  const auto j = res.report();
  EXPECT_EQ(j["kind"], "wigner_le");
  ASSERT_TRUE(j["checks"].is_array());
  EXPECT_EQ(j["checks"].size(), res.checks.size());
  EXPECT_NE(res.find("laplace_pairing_h0"), nullptr);
  EXPECT_NE(res.find("laplace_pairing_h1"), nullptr);
  EXPECT_EQ(j["passed"].get<bool>(), res.passed());
}

TEST(Experiment, BudgetGuard) {
  ExperimentConfig c = parse_config_string(kTinyHydro);
  const double ev = estimate_events(c);
  EXPECT_GT(ev, 0.0);
  RunOptions o;
  o.max_events = ev / 2;
  EXPECT_THROW(run_experiment(c, o), BudgetError);
  o.max_events = ev * 2;
  EXPECT_NO_THROW(run_experiment(c, o));
}

TEST(Experiment, NondeterministicPlotsCarryTimestamp) {
  const ExperimentResult res = run_experiment(parse_config_string(kTinyEquilibrium), RunOptions{});
  ASSERT_FALSE(res.plots.empty());
  const auto dir = std::filesystem::path(::testing::TempDir()) / "hydrochain_stamp";
  std::filesystem::remove_all(dir);
  write_outputs(res, dir, false);
  const std::string svg = slurp(dir / "plots" / res.plots.begin()->first);
  EXPECT_NE(svg.find("generated "), std::string::npos);
  write_outputs(res, dir, true);
  EXPECT_EQ(slurp(dir / "plots" / res.plots.begin()->first).find("generated "), std::string::npos);
}

}  // namespace
}  // namespace hydrochain
