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

#ifndef LAPD_HARNESS_CONFIG_HPP
#define LAPD_HARNESS_CONFIG_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lapd/sampler.hpp"
#include "lapd/schedule.hpp"
#include "lapd/targets.hpp"

namespace lapd::harness {

using Json = nlohmann::json;

enum class TargetKind { Quadratic, Mixture };

struct TargetConfig {
  TargetKind kind = TargetKind::Quadratic;
  double lambda = 0.0;   // quadratic
  std::size_t dim = 0;   // quadratic: ambient dim; mixture: padded dim (>= means width)
  Matrix means;          // mixture, K x dim after padding
  double alpha_star = 0.1;
};

struct ConstantOverrides {
  std::optional<double> m;
  std::optional<double> alpha_star;
  std::optional<double> L;
};

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::Fixed;
  double epsilon = 0.1;
  std::optional<double> eta;
  std::optional<double> kl0;
};

struct InitConfig {
  Vector mean;  // padded to the target dimension
  double std = 1.0;
};

struct MetricOptions {
  int hist_bins = 64;
  int w2_projections = 0;
  std::size_t w2_samples = 2000;
};

enum class SweepAxis { Dimension, Eta, Schedule };

struct ExperimentConfig {
  TargetConfig target;
  ConstantOverrides constants;
  SamplerKind sampler = SamplerKind::Lapd;
  ScheduleConfig schedule;
  InitConfig init;
  MetricOptions metrics;
  std::size_t n_chains = 1;
  std::int64_t n_steps = 0;
  std::int64_t metric_every = 1;
  std::uint64_t master_seed = 0;
  std::optional<std::string> output_path;

  Json document;  // the parsed document the config was built from
};

/// Reads and parses a config file; relative `means_csv` paths resolve against
/// the file's directory. Throws ConfigError.
Json load_config_document(const std::filesystem::path& path);

/// Builds a config from a JSON document. Throws ConfigError naming the
/// offending field.
ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});

/// Hex FNV-1a-64 of the canonical (sorted-key, compact) document with the
/// run-local fields master_seed, output_path and sweep removed.
std::string config_hash(const Json& doc);

/// Reads a K x d means table: one mean per line, comma-separated, no header.
Matrix read_means_csv(const std::filesystem::path& path);

SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

}  // namespace lapd::harness

#endif  // LAPD_HARNESS_CONFIG_HPP
