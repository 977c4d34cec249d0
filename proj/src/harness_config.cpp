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

#include "lapd/harness_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lapd/errors.hpp"

namespace lapd::harness {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const Json* find(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number_at(const Json& obj, const char* key, const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr) fail(path, "missing required field");
  if (!v->is_number()) fail(path, "expected a number");
  return v->get<double>();
}

std::optional<double> optional_number(const Json& obj, const char* key, const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (!v->is_number()) fail(path, "expected a number");
  return v->get<double>();
}

std::int64_t integer_at(const Json& obj, const char* key, const std::string& path,
                        std::optional<std::int64_t> fallback = std::nullopt) {
  const Json* v = find(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    fail(path, "missing required field");
  }
  if (!v->is_number_integer()) fail(path, "expected an integer");
  return v->get<std::int64_t>();
}

std::string string_at(const Json& obj, const char* key, const std::string& path,
                      std::optional<std::string> fallback = std::nullopt) {
  const Json* v = find(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    fail(path, "missing required field");
  }
  if (!v->is_string()) fail(path, "expected a string");
  return v->get<std::string>();
}

Matrix means_from_json(const Json& rows) {
  if (!rows.is_array() || rows.empty()) fail("target.means", "expected a non-empty array of rows");
  const std::size_t width = rows.front().is_array() ? rows.front().size() : 0;
  if (width == 0) fail("target.means", "rows must be non-empty arrays of numbers");
  Matrix means(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != width) {
      fail("target.means", "row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (!row[j].is_number()) fail("target.means", "expected numbers");
      means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return means;
}

Matrix pad_columns(const Matrix& m, std::size_t dim) {
  Matrix out = Matrix::Zero(m.rows(), static_cast<Eigen::Index>(dim));
  out.leftCols(m.cols()) = m;
  return out;
}

TargetConfig parse_target(const Json& doc, const std::filesystem::path& base_dir) {
  const Json* t = find(doc, "target");
  if (t == nullptr || !t->is_object()) fail("target", "missing required object");
  TargetConfig out;
  const std::string kind = string_at(*t, "kind", "target.kind");
  if (kind == "quadratic") {
    out.kind = TargetKind::Quadratic;
    out.lambda = number_at(*t, "lambda", "target.lambda");
    if (!(out.lambda >= 0.0)) fail("target.lambda", "must be >= 0");
    const auto dim = integer_at(*t, "dim", "target.dim");
    if (dim < 1) fail("target.dim", "must be >= 1");
    out.dim = static_cast<std::size_t>(dim);
  } else if (kind == "mixture") {
    out.kind = TargetKind::Mixture;
    const Json* inline_means = find(*t, "means");
    const Json* csv = find(*t, "means_csv");
    if ((inline_means == nullptr) == (csv == nullptr)) {
      fail("target.means", "give exactly one of means or means_csv");
    }
    Matrix means;
    if (inline_means != nullptr) {
      means = means_from_json(*inline_means);
    } else {
      if (!csv->is_string()) fail("target.means_csv", "expected a path string");
      std::filesystem::path p = csv->get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      means = read_means_csv(p);
    }
    const auto dim = integer_at(*t, "dim", "target.dim", means.cols());
    if (dim < means.cols()) fail("target.dim", "smaller than the width of the means");
    out.dim = static_cast<std::size_t>(dim);
    out.means = pad_columns(means, out.dim);
    out.alpha_star = optional_number(*t, "alpha_star", "target.alpha_star").value_or(0.1);
  } else {
    fail("target.kind", "expected \"quadratic\" or \"mixture\", got \"" + kind + "\"");
  }
  return out;
}

ScheduleConfig parse_schedule(const Json& doc) {
  const Json* s = find(doc, "schedule");
  ScheduleConfig out;
  if (s == nullptr) return out;
  if (!s->is_object()) fail("schedule", "expected an object");
  const std::string kind = string_at(*s, "kind", "schedule.kind", "fixed");
  if (kind == "fixed") {
    out.kind = ScheduleKind::Fixed;
  } else if (kind == "varying") {
    out.kind = ScheduleKind::Varying;
  } else {
    fail("schedule.kind", "expected \"fixed\" or \"varying\", got \"" + kind + "\"");
  }
  out.epsilon = optional_number(*s, "epsilon", "schedule.epsilon").value_or(0.1);
  out.eta = optional_number(*s, "eta", "schedule.eta");
  out.kl0 = optional_number(*s, "kl0", "schedule.kl0");
  if (out.eta && out.kind == ScheduleKind::Varying) {
    fail("schedule.eta", "only valid with the fixed schedule");
  }
  return out;
}

InitConfig parse_init(const Json& doc, std::size_t dim) {
  InitConfig out;
  out.mean = Vector::Zero(static_cast<Eigen::Index>(dim));
  const Json* init = find(doc, "init");
  if (init == nullptr) return out;
  if (!init->is_object()) fail("init", "expected an object");
  out.std = optional_number(*init, "std", "init.std").value_or(1.0);
  if (const Json* mean = find(*init, "mean")) {
    if (mean->is_number()) {
      out.mean.setConstant(mean->get<double>());
    } else if (mean->is_array()) {
      if (mean->size() > dim) fail("init.mean", "longer than the target dimension");
      for (std::size_t i = 0; i < mean->size(); ++i) {
        if (!(*mean)[i].is_number()) fail("init.mean", "expected numbers");
        out.mean[static_cast<Eigen::Index>(i)] = (*mean)[i].get<double>();
      }
    } else {
      fail("init.mean", "expected a number or an array");
    }
  }
  return out;
}

}  // namespace

Matrix read_means_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("target.means_csv", "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail("target.means_csv", "bad number '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail("target.means_csv", "ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) fail("target.means_csv", "no means in " + path.string());
  Matrix means(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return means;
}

Json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("config", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.document = doc;
  cfg.target = parse_target(doc, base_dir);

  if (const Json* c = find(doc, "constants")) {
    if (!c->is_object()) fail("constants", "expected an object");
    cfg.constants.m = optional_number(*c, "m", "constants.m");
    cfg.constants.alpha_star = optional_number(*c, "alpha_star", "constants.alpha_star");
    cfg.constants.L = optional_number(*c, "L", "constants.L");
  }

  const std::string sampler = string_at(doc, "sampler", "sampler", "lapd");
  if (sampler == "lapd") {
    cfg.sampler = SamplerKind::Lapd;
  } else if (sampler == "ula") {
    cfg.sampler = SamplerKind::Ula;
  } else {
    fail("sampler", "expected \"lapd\" or \"ula\", got \"" + sampler + "\"");
  }

  cfg.schedule = parse_schedule(doc);
  cfg.init = parse_init(doc, cfg.target.dim);

  if (const Json* m = find(doc, "metrics")) {
    if (!m->is_object()) fail("metrics", "expected an object");
    cfg.metrics.hist_bins = static_cast<int>(integer_at(*m, "hist_bins", "metrics.hist_bins", 64));
    cfg.metrics.w2_projections =
        static_cast<int>(integer_at(*m, "w2_projections", "metrics.w2_projections", 0));
    const auto w2_samples = integer_at(*m, "w2_samples", "metrics.w2_samples", 2000);
    if (w2_samples < 1) fail("metrics.w2_samples", "must be >= 1");
    cfg.metrics.w2_samples = static_cast<std::size_t>(w2_samples);
    if (cfg.metrics.hist_bins < 2) fail("metrics.hist_bins", "must be >= 2");
    if (cfg.metrics.w2_projections < 0) fail("metrics.w2_projections", "must be >= 0");
  }

  const auto n_chains = integer_at(doc, "n_chains", "n_chains");
  if (n_chains < 1) fail("n_chains", "must be >= 1");
  cfg.n_chains = static_cast<std::size_t>(n_chains);
  cfg.n_steps = integer_at(doc, "n_steps", "n_steps");
  if (cfg.n_steps < 0) fail("n_steps", "must be >= 0");
  cfg.metric_every = integer_at(doc, "metric_every", "metric_every", 1);
  if (cfg.metric_every < 1) fail("metric_every", "must be >= 1");

  if (const Json* seed = find(doc, "master_seed")) {
    if (!seed->is_number_integer() || (seed->is_number_integer() && !seed->is_number_unsigned() &&
                                       seed->get<std::int64_t>() < 0)) {
      fail("master_seed", "expected a non-negative integer");
    }
    cfg.master_seed = seed->get<std::uint64_t>();
  }
  if (const Json* out = find(doc, "output_path")) {
    if (!out->is_string()) fail("output_path", "expected a string");
    cfg.output_path = out->get<std::string>();
  }
  return cfg;
}

std::string config_hash(const Json& doc) {
  Json canonical = doc;
  if (canonical.is_object()) {
    canonical.erase("master_seed");
    canonical.erase("output_path");
    canonical.erase("sweep");
  }
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "dimension") return SweepAxis::Dimension;
  if (name == "eta") return SweepAxis::Eta;
  if (name == "schedule") return SweepAxis::Schedule;
  throw ConfigError("--axis: expected dimension, eta or schedule, got \"" + name + "\"");
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Dimension:
      return "dimension";
    case SweepAxis::Eta:
      return "eta";
    case SweepAxis::Schedule:
      return "schedule";
  }
  return "";
}

}  // namespace lapd::harness
