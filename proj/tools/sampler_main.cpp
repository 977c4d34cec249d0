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

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lapd/errors.hpp"
#include "lapd/harness_config.hpp"
#include "lapd/harness_experiment.hpp"
#include "lapd/validation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lapd;
using namespace lapd::harness;

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct OutputOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool force = false;
};

Json load_with_overrides(const std::string& config_path, const OutputOptions& opts) {
  Json doc = load_config_document(config_path);
  if (opts.seed) doc["master_seed"] = *opts.seed;
  if (opts.out) doc["output_path"] = *opts.out;
  return doc;
}

// Runs `body` against the configured CSV destination; stdout when no path is set.
template <typename Body>
void with_csv_output(const Json& doc, bool force, Body&& body) {
  std::optional<std::string> path;
  if (auto it = doc.find("output_path"); it != doc.end() && it->is_string()) path = it->get<std::string>();
  if (!path) {
    CsvWriter writer(std::cout);
    writer.write_header();
    body(writer);
    std::cout.flush();
    return;
  }
  if (fs::exists(*path) && !force) {
    throw ConfigError("output_path: " + *path + " already exists (pass --force to overwrite)");
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("output_path: cannot open " + *path + " for writing");
  CsvWriter writer(file);
  writer.write_header();
  body(writer);
  file.flush();
  if (!file) throw std::runtime_error("write failed: " + *path);
}

int cmd_run(const std::string& config_path, const OutputOptions& opts) {
  const Json doc = load_with_overrides(config_path, opts);
  const ExperimentConfig cfg = parse_config(doc, fs::path(config_path).parent_path());
  resolve_experiment(cfg);
  with_csv_output(doc, opts.force, [&](CsvWriter& writer) {
    const RunSummary s =
        run_experiment(cfg, "0", "", [&](const ExperimentRecord& r) { writer.write(r); });
    std::cerr << format_summary(s) << '\n';
  });
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const OutputOptions& opts) {
  const SweepAxis parsed = parse_axis(axis);
  const Json doc = load_with_overrides(config_path, opts);
  const fs::path base_dir = fs::path(config_path).parent_path();
  plan_sweep(doc, parsed, base_dir);
  with_csv_output(doc, opts.force, [&](CsvWriter& writer) {
    const auto summaries =
        run_sweep(doc, parsed, base_dir, [&](const ExperimentRecord& r) { writer.write(r); });
    for (const auto& s : summaries) std::cerr << format_summary(s) << '\n';
  });
  return 0;
}

int cmd_validate(const std::string& suite) {
  const auto results = validation::run_suite(suite);
  return validation::report(std::cout, results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAPD / ULA sampler experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string axis;
  std::string suite;
  OutputOptions opts;

  auto add_output_options = [&](CLI::App* sub) {
    sub->add_option("--seed", opts.seed, "Override master_seed");
    sub->add_option("--out", opts.out, "Override output_path");
    sub->add_flag("--force", opts.force, "Overwrite an existing output file");
  };

  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config_path, "Experiment JSON")->required();
  add_output_options(run);

  CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per sweep value");
  sweep->add_option("config", config_path, "Experiment JSON")->required();
  sweep->add_option("--axis", axis, "dimension | eta | schedule")->required();
  add_output_options(sweep);

  CLI::App* validate = app.add_subcommand("validate", "Run an invariant suite");
  validate->add_option("suite", suite, "kernel | gradients | schedules | oracle")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, opts);
    if (*sweep) return cmd_sweep(config_path, axis, opts);
    return cmd_validate(suite);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
