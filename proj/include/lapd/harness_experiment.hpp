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

#ifndef LAPD_HARNESS_EXPERIMENT_HPP
#define LAPD_HARNESS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lapd/harness_config.hpp"
#include "lapd/schedule.hpp"
#include "lapd/targets.hpp"

namespace lapd::harness {

/// One CSV row.
struct ExperimentRecord {
  std::string run_id;
  std::int64_t k = 0;
  std::string metric;
  double value = 0.0;
  std::size_t d = 0;
  std::string axis_value;
  std::string config_hash;
  std::uint64_t seed = 0;
};

using RecordSink = std::function<void(const ExperimentRecord&)>;

/// Target, constants and schedule with every theorem constant resolved.
struct ResolvedExperiment {
  Target target;
  TargetConstants constants;
  ScheduleSpec schedule;
  std::optional<double> kl0;
};

/// Throws InvariantViolation (or ConfigError for missing inputs).
ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

struct RunSummary {
  std::string run_id;
  std::string axis_value;
  std::size_t d = 0;
  TargetConstants constants;
  double eta_hat = 0.0;
  double eta_first = 0.0;
  std::int64_t k0 = 0;
  std::optional<double> kl0;
  std::string config_hash;
};

/// Runs one experiment, emitting metric rows at k = 0 and every
/// metric_every steps.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& run_id,
                          const std::string& axis_value, const RecordSink& sink);

/// One sweep point: the rewritten document and its axis_value column text.
struct SweepPoint {
  Json document;
  std::string axis_value;
};

/// Expands `sweep.<axis>` of the document into one document per value.
/// Dimension values set target.dim (mixture means are zero-padded); eta
/// values are numbers or "eta_hat" / "eta_hat/<divisor>"; schedule values
/// are "fixed" / "varying".
std::vector<SweepPoint> plan_sweep(const Json& doc, SweepAxis axis,
                                   const std::filesystem::path& base_dir = {});

std::vector<RunSummary> run_sweep(const Json& doc, SweepAxis axis,
                                  const std::filesystem::path& base_dir, const RecordSink& sink);

std::string format_summary(const RunSummary& s);

// CSV --------------------------------------------------------------------

/// Shortest-round-trip-safe text: 17 significant digits.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out);
  void write_header();
  void write(const ExperimentRecord& r);

 private:
  std::ostream& out_;
};

}  // namespace lapd::harness

#endif  // LAPD_HARNESS_EXPERIMENT_HPP
