/*
 * Copyright (C) 2026 The lapd-sampler Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lapd/harness_experiment.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "lapd/errors.hpp"
#include "lapd/harness_config.hpp"

namespace lapd::harness {
namespace {

namespace fs = std::filesystem;

Json minimal_quadratic() {
  return Json::parse(R"({
    "target": {"kind": "quadratic", "lambda": 1, "dim": 2},
    "n_chains": 10, "n_steps": 0, "metric_every": 1, "master_seed": 5
  })");
}

Json pair_mixture() {
  return Json::parse(R"({
    "target": {"kind": "mixture", "means": [[1.0], [-1.0]]},
    "schedule": {"kind": "varying", "kl0": 0.2},
    "n_chains": 200, "n_steps": 20, "metric_every": 5, "master_seed": 3,
    "sweep": {"dimension": [2, 8, 32, 128]}
  })");
}

std::vector<ExperimentRecord> collect(const ExperimentConfig& cfg) {
  std::vector<ExperimentRecord> out;
  run_experiment(cfg, "0", "", [&](const ExperimentRecord& r) { out.push_back(r); });
  return out;
}

std::string csv_of_run(const Json& doc) {
  std::ostringstream os;
  CsvWriter w(os);
  w.write_header();
  run_experiment(parse_config(doc), "0", "", [&](const ExperimentRecord& r) { w.write(r); });
  return os.str();
}

std::string expect_config_error(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for " << doc.dump();
  return {};
}

TEST(ParseConfig, MinimalQuadratic) {
  const ExperimentConfig cfg = parse_config(minimal_quadratic());
  EXPECT_EQ(cfg.target.kind, TargetKind::Quadratic);
  EXPECT_EQ(cfg.target.dim, 2u);
  EXPECT_EQ(cfg.sampler, SamplerKind::Lapd);
  EXPECT_EQ(cfg.schedule.kind, ScheduleKind::Fixed);
  EXPECT_EQ(cfg.init.mean, Vector::Zero(2));
  EXPECT_EQ(cfg.init.std, 1.0);
  EXPECT_EQ(cfg.master_seed, 5u);
  EXPECT_FALSE(cfg.output_path);
}

TEST(ParseConfig, MixtureMeansArePadded) {
  Json doc = pair_mixture();
  doc["target"]["dim"] = 4;
  const ExperimentConfig cfg = parse_config(doc);
  ASSERT_EQ(cfg.target.means.rows(), 2);
  ASSERT_EQ(cfg.target.means.cols(), 4);
  EXPECT_EQ(cfg.target.means(0, 0), 1.0);
  EXPECT_EQ(cfg.target.means.rightCols(3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(cfg.init.mean.size(), 4);
}

TEST(ParseConfig, MeansCsvResolvesAgainstTheConfigDirectory) {
  const fs::path dir = fs::temp_directory_path() / "lapd_means_csv_test";
  fs::create_directories(dir);
  std::ofstream(dir / "means.csv") << "1.5,0\r\n-1.5,0\n";
  Json doc = pair_mixture();
  doc["target"].erase("means");
  doc["target"]["means_csv"] = "means.csv";
  const ExperimentConfig cfg = parse_config(doc, dir);
  EXPECT_EQ(cfg.target.means(1, 0), -1.5);
  EXPECT_EQ(cfg.target.means.cols(), 2);
  std::ofstream(dir / "bad.csv") << "1,2\n3\n";
  doc["target"]["means_csv"] = "bad.csv";
  EXPECT_THROW(parse_config(doc, dir), ConfigError);
  fs::remove_all(dir);
}

TEST(ParseConfig, ErrorsNameTheField) {
  Json doc = minimal_quadratic();
  doc.erase("target");
  EXPECT_NE(expect_config_error(doc).find("target"), std::string::npos);

  doc = minimal_quadratic();
  doc["n_chains"] = 0;
  EXPECT_NE(expect_config_error(doc).find("n_chains"), std::string::npos);

  doc = minimal_quadratic();
  doc["metric_every"] = 0;
  EXPECT_NE(expect_config_error(doc).find("metric_every"), std::string::npos);

  doc = minimal_quadratic();
  doc["n_steps"] = -1;
  EXPECT_NE(expect_config_error(doc).find("n_steps"), std::string::npos);

  doc = minimal_quadratic();
  doc["target"]["lambda"] = "one";
  EXPECT_NE(expect_config_error(doc).find("target.lambda"), std::string::npos);

  doc = minimal_quadratic();
  doc["sampler"] = "mala";
  EXPECT_NE(expect_config_error(doc).find("sampler"), std::string::npos);

  doc = minimal_quadratic();
  doc["schedule"] = {{"kind", "cosine"}};
  EXPECT_NE(expect_config_error(doc).find("schedule.kind"), std::string::npos);
}

TEST(ConfigHash, IndependentOfRunLocalFields) {
  Json a = minimal_quadratic();
  Json b = a;
  b["master_seed"] = 99;
  b["output_path"] = "/tmp/x.csv";
  b["sweep"] = {{"eta", {1, 2}}};
  EXPECT_EQ(config_hash(a), config_hash(b));
  b["target"]["lambda"] = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ConfigHash, FrozenValue) {
  // FNV-1a-64 of {"metric_every":1,"n_chains":10,"n_steps":0,"target":{"dim":2,"kind":"quadratic","lambda":1}}.
  EXPECT_EQ(config_hash(minimal_quadratic()), "d7676c4d824c84d3");
}

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, HeaderAndRow) {
  std::ostringstream os;
  CsvWriter w(os);
  w.write_header();
  w.write({"r,1", 10, "kl_exact", 0.5, 4, "eta_hat", "abc", 7});
  EXPECT_EQ(os.str(),
            "run_id,k,metric,value,d,axis_value,config_hash,seed\r\n"
            "\"r,1\",10,kl_exact,0.5,4,eta_hat,abc,7\r\n");
}

TEST(RunExperiment, ZeroStepsEmitsOneBlockAtZero) {
  const auto records = collect(parse_config(minimal_quadratic()));
  std::vector<std::string> metrics;
  for (const auto& r : records) {
    EXPECT_EQ(r.k, 0);
    EXPECT_EQ(r.d, 2u);
    EXPECT_EQ(r.seed, 5u);
    EXPECT_EQ(r.config_hash, "d7676c4d824c84d3");
    metrics.push_back(r.metric);
  }
  EXPECT_EQ(metrics, (std::vector<std::string>{"kl_exact", "kl_bound_fixed", "kl_hist1d",
                                               "coord_var_bias"}));
  // Initialized at N(0, I) against N(0, I/2): 2 * 0.5 (1 - ln 2).
  EXPECT_NEAR(records[0].value, 1.0 - std::log(2.0), 1e-15);
}

TEST(RunExperiment, OneRowPerRunStepMetric) {
  Json doc = minimal_quadratic();
  doc["n_steps"] = 30;
  doc["metric_every"] = 7;
  doc["metrics"] = {{"w2_projections", 4}};
  std::set<std::pair<std::int64_t, std::string>> seen;
  std::set<std::int64_t> ks;
  for (const auto& r : collect(parse_config(doc))) {
    EXPECT_TRUE(seen.insert({r.k, r.metric}).second) << r.k << " " << r.metric;
    ks.insert(r.k);
  }
  EXPECT_EQ(ks, (std::set<std::int64_t>{0, 7, 14, 21, 28}));
  EXPECT_EQ(seen.size(), 5u * 5u);
}

TEST(RunExperiment, SameSeedIsByteIdentical) {
  Json doc = pair_mixture();
  doc["metrics"] = {{"w2_projections", 8}};
  EXPECT_EQ(csv_of_run(doc), csv_of_run(doc));
  Json other = doc;
  other["master_seed"] = 4;
  EXPECT_NE(csv_of_run(doc), csv_of_run(other));
}

TEST(RunExperiment, LapdGaussianBlockStaysExact) {
  Json doc = pair_mixture();
  doc["target"]["dim"] = 6;
  for (const auto& r : collect(parse_config(doc))) {
    if (r.metric == "kl_exact") EXPECT_LT(r.value, 1e-12);
  }
}

TEST(RunExperiment, VaryingBoundEmittedFromBurnIn) {
  Json doc = pair_mixture();
  doc["schedule"]["kl0"] = 1e4;
  doc["n_steps"] = 0;
  const ResolvedExperiment ex = resolve_experiment(parse_config(doc));
  ASSERT_GT(ex.schedule.k0, 0);
  for (const auto& r : collect(parse_config(doc))) EXPECT_NE(r.metric, "kl_bound_varying");
  doc["schedule"]["kl0"] = 0.2;
  bool found = false;
  for (const auto& r : collect(parse_config(doc))) found = found || r.metric == "kl_bound_varying";
  EXPECT_TRUE(found);
}

TEST(ResolveExperiment, CorruptedPriorIsAnInvariantViolation) {
  Json doc = pair_mixture();
  doc["constants"] = {{"m", -1.0}};
  try {
    resolve_experiment(parse_config(doc));
    ADD_FAILURE() << "accepted m = -1";
  } catch (const InvariantViolation& e) {
    EXPECT_STREQ(e.what(), "constants.m must be > 0");
  }
}

TEST(ResolveExperiment, LapdStepAboveEtaHatIsRejected) {
  Json doc = minimal_quadratic();
  doc["schedule"] = {{"kind", "fixed"}, {"eta", 0.5}};
  EXPECT_THROW(resolve_experiment(parse_config(doc)), InvariantViolation);
  doc["sampler"] = "ula";
  EXPECT_NO_THROW(resolve_experiment(parse_config(doc)));
}

TEST(ResolveExperiment, VaryingMixtureNeedsKl0) {
  Json doc = pair_mixture();
  doc["schedule"].erase("kl0");
  EXPECT_THROW(resolve_experiment(parse_config(doc)), ConfigError);
}

TEST(PlanSweep, DimensionKeepsTraces) {
  const auto points = plan_sweep(pair_mixture(), SweepAxis::Dimension);
  ASSERT_EQ(points.size(), 4u);
  const std::vector<std::string> axis{"2", "8", "32", "128"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(points[i].axis_value, axis[i]);
    const ResolvedExperiment ex = resolve_experiment(parse_config(points[i].document));
    EXPECT_EQ(ex.target.dim(), std::stoul(axis[i]));
    EXPECT_EQ(ex.constants.tr_h, 16.0);
    EXPECT_EQ(ex.constants.tr_h_sqrt, 4.0);
  }
}

TEST(PlanSweep, EtaFractionsOfEtaHat) {
  Json doc = minimal_quadratic();
  doc["sweep"] = {{"eta", {"eta_hat", "eta_hat/2", "eta_hat/4", 1e-4}}};
  const double eta_hat = resolve_experiment(parse_config(doc)).schedule.eta_hat;
  const auto points = plan_sweep(doc, SweepAxis::Eta);
  ASSERT_EQ(points.size(), 4u);
  const double expected[] = {eta_hat, eta_hat / 2, eta_hat / 4, 1e-4};
  for (std::size_t i = 0; i < 4; ++i) {
    const ResolvedExperiment ex = resolve_experiment(parse_config(points[i].document));
    EXPECT_EQ(ex.schedule.eta, expected[i]);
    EXPECT_EQ(points[i].axis_value, format_double(expected[i]));
  }
}

TEST(PlanSweep, ScheduleKinds) {
  Json doc = pair_mixture();
  doc["sweep"] = {{"schedule", {"fixed", "varying"}}};
  const auto points = plan_sweep(doc, SweepAxis::Schedule);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(parse_config(points[0].document).schedule.kind, ScheduleKind::Fixed);
  EXPECT_EQ(parse_config(points[1].document).schedule.kind, ScheduleKind::Varying);
}

TEST(PlanSweep, RejectsEmptyOrMissingAxes) {
  Json doc = pair_mixture();
  doc["sweep"]["dimension"] = Json::array();
  EXPECT_THROW(plan_sweep(doc, SweepAxis::Dimension), ConfigError);
  EXPECT_THROW(plan_sweep(pair_mixture(), SweepAxis::Eta), ConfigError);
  EXPECT_THROW(parse_axis("temperature"), ConfigError);
}

TEST(RunSweep, RunIdsAndAxisValues) {
  Json doc = pair_mixture();
  doc["n_steps"] = 0;
  std::map<std::string, std::string> axis_by_run;
  const auto summaries = run_sweep(doc, SweepAxis::Dimension, {}, [&](const ExperimentRecord& r) {
    axis_by_run[r.run_id] = r.axis_value;
    EXPECT_EQ(std::to_string(r.d), r.axis_value);
  });
  EXPECT_EQ(axis_by_run, (std::map<std::string, std::string>{
                             {"0", "2"}, {"1", "8"}, {"2", "32"}, {"3", "128"}}));
  ASSERT_EQ(summaries.size(), 4u);
  for (const auto& s : summaries) {
    EXPECT_EQ(s.constants.tr_h, 16.0);
    EXPECT_NE(format_summary(s).find("tr_h=16"), std::string::npos);
  }
}

// CLI ------------------------------------------------------------------------

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lapd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const Json& doc, const std::string& name = "config.json") {
    std::ofstream(dir_ / name) << doc.dump(2);
    return dir_ / name;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(SAMPLER_BINARY) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

TEST_F(Cli, RunWritesCsvToStdout) {
  const fs::path cfg = write_config(minimal_quadratic());
  ASSERT_EQ(run("run " + cfg.string()), 0);
  const std::string out = slurp(dir_ / "stdout.txt");
  EXPECT_EQ(out.rfind("run_id,k,metric,value,d,axis_value,config_hash,seed\r\n", 0), 0u);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("tr_h=2"), std::string::npos);
}

TEST_F(Cli, OutputFileIsNotOverwrittenWithoutForce) {
  const fs::path cfg = write_config(minimal_quadratic());
  const std::string out = (dir_ / "out.csv").string();
  ASSERT_EQ(run("run " + cfg.string() + " --out " + out), 0);
  const std::string first = slurp(out);
  EXPECT_EQ(run("run " + cfg.string() + " --out " + out), 2);
  EXPECT_EQ(slurp(out), first);
  EXPECT_EQ(run("run " + cfg.string() + " --out " + out + " --force"), 0);
  EXPECT_EQ(slurp(out), first);
}

TEST_F(Cli, SeedOverride) {
  const fs::path cfg = write_config(minimal_quadratic());
  ASSERT_EQ(run("run " + cfg.string() + " --seed 77"), 0);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find(",77\r\n"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  Json bad = minimal_quadratic();
  bad["n_chains"] = "many";
  EXPECT_EQ(run("run " + write_config(bad, "bad.json").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("n_chains"), std::string::npos);

  Json corrupted = pair_mixture();
  corrupted["constants"] = {{"m", 0.0}};
  EXPECT_EQ(run("run " + write_config(corrupted, "m.json").string()), 3);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("constants.m must be > 0"), std::string::npos);

  EXPECT_EQ(run("run " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("validate nonsense"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("sweep " + write_config(minimal_quadratic()).string() + " --axis dimension"), 2);
  EXPECT_EQ(run("sweep " + write_config(pair_mixture()).string() + " --axis nope"), 2);
}

TEST_F(Cli, SweepIsDeterministic) {
  Json doc = pair_mixture();
  doc["n_steps"] = 10;
  const fs::path cfg = write_config(doc);
  ASSERT_EQ(run("sweep " + cfg.string() + " --axis dimension --out " + (dir_ / "a.csv").string()), 0);
  ASSERT_EQ(run("sweep " + cfg.string() + " --axis dimension --out " + (dir_ / "b.csv").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(Cli, ValidateSchedulesPasses) {
  EXPECT_EQ(run("validate schedules"), 0);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("PASS"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "stdout.txt").find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace lapd::harness
