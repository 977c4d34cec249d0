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

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "lapd/errors.hpp"
#include "lapd/metrics.hpp"
#include "lapd/random.hpp"
#include "lapd/sampler.hpp"

namespace lapd::harness {

namespace {

Target build_target(const ExperimentConfig& cfg) {
  const double m = cfg.constants.m.value_or(1.0);
  if (!(m > 0.0)) throw InvariantViolation("constants.m must be > 0");
  if (cfg.target.kind == TargetKind::Quadratic) {
    return QuadraticTarget(cfg.target.lambda, cfg.target.dim, m);
  }
  return GaussianMixtureTarget(cfg.target.means, cfg.target.alpha_star, m);
}

GaussianMoments block_init(const ExperimentConfig& cfg, std::span<const std::size_t> block) {
  GaussianMoments mom;
  mom.mean.resize(static_cast<Eigen::Index>(block.size()));
  for (std::size_t j = 0; j < block.size(); ++j) {
    mom.mean[static_cast<Eigen::Index>(j)] = cfg.init.mean[static_cast<Eigen::Index>(block[j])];
  }
  mom.var = Vector::Constant(mom.mean.size(), cfg.init.std * cfg.init.std);
  return mom;
}

}  // namespace

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg) {
  Target target = build_target(cfg);
  TargetConstants c = target.constants();
  if (cfg.constants.alpha_star) c.alpha_star = *cfg.constants.alpha_star;
  if (cfg.constants.L) c.L = *cfg.constants.L;
  c.validate(target.dim());
  if (!(cfg.init.std > 0.0)) throw InvariantViolation("init.std must be > 0");

  std::optional<double> kl0 = cfg.schedule.kl0;
  if (kl0 && !(*kl0 >= 0.0)) throw InvariantViolation("schedule.kl0 must be >= 0");
  if (!kl0 && target.is_quadratic()) {
    const auto block = target.gaussian_block();
    kl0 = gaussian_kl(block_init(cfg, block),
                      GaussianMoments::isotropic(Vector::Zero(static_cast<Eigen::Index>(block.size())),
                                                 target.gaussian_block_variance()));
  }

  ScheduleSpec schedule;
  if (cfg.schedule.kind == ScheduleKind::Fixed) {
    schedule = cfg.schedule.eta ? ScheduleSpec::fixed_with_eta(c, cfg.schedule.epsilon, *cfg.schedule.eta)
                                : ScheduleSpec::fixed(c, cfg.schedule.epsilon);
    if (cfg.sampler == SamplerKind::Lapd && schedule.eta > schedule.eta_hat * (1.0 + 1e-12)) {
      throw InvariantViolation("schedule.eta " + format_double(schedule.eta) +
                               " exceeds eta_hat " + format_double(schedule.eta_hat));
    }
  } else {
    if (!kl0) throw ConfigError("schedule.kl0: required by the varying schedule for mixture targets");
    schedule = ScheduleSpec::varying(c, *kl0);
  }
  return {std::move(target), c, schedule, kl0};
}

RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& run_id,
                          const std::string& axis_value, const RecordSink& sink) {
  const ResolvedExperiment ex = resolve_experiment(cfg);
  const Target& target = ex.target;
  const TargetConstants& c = ex.constants;
  const std::size_t d = target.dim();
  const std::string hash = config_hash(cfg.document);

  RunSummary summary{.run_id = run_id,
                     .axis_value = axis_value,
                     .d = d,
                     .constants = c,
                     .eta_hat = ex.schedule.eta_hat,
                     .eta_first = ex.schedule.step_size(0),
                     .k0 = ex.schedule.k0,
                     .kl0 = ex.kl0,
                     .config_hash = hash};

  // Exact draws from p*, shared by every checkpoint of this run.
  const std::size_t n_ref = cfg.n_chains;
  Positions reference(static_cast<Eigen::Index>(n_ref), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n_ref; ++i) {
    RandomStream rng(cfg.master_seed, kAuxStreamBase + i);
    target.sample(rng, {reference.row(static_cast<Eigen::Index>(i)).data(), d});
  }
  std::vector<double> reference_coord0(n_ref);
  for (std::size_t i = 0; i < n_ref; ++i) reference_coord0[i] = reference(static_cast<Eigen::Index>(i), 0);
  const std::size_t n_w2 = std::min(cfg.metrics.w2_samples, cfg.n_chains);
  const Positions reference_w2 = reference.topRows(static_cast<Eigen::Index>(n_w2));

  const std::vector<std::size_t> block = target.gaussian_block();
  const double block_lambda = target.gaussian_block_lambda();
  const double block_var = target.gaussian_block_variance();
  const GaussianMoments block_target = GaussianMoments::isotropic(
      Vector::Zero(static_cast<Eigen::Index>(block.size())), block_var);
  GaussianMoments block_moments = block_init(cfg, block);
  std::int64_t moments_k = 0;

  const bool lapd = cfg.sampler == SamplerKind::Lapd;
  const bool fixed = ex.schedule.kind == ScheduleKind::Fixed;

  auto emit = [&](std::int64_t k, const char* metric, double value) {
    sink({run_id, k, metric, value, d, axis_value, hash, cfg.master_seed});
  };

  auto on_checkpoint = [&](const ChainState& state) {
    const std::int64_t k = state.k;
    for (; moments_k < k; ++moments_k) {
      const double eta = ex.schedule.step_size(moments_k);
      block_moments = lapd ? gaussian_chain_advance(block_moments, block_lambda, c.m, eta,
                                                    coupled_eta_tilde(eta, c.m))
                           : ula_gaussian_advance(block_moments, block_lambda, c.m, eta);
    }
    if (!block.empty()) emit(k, "kl_exact", gaussian_kl(block_moments, block_target));
    if (lapd && fixed && ex.kl0) {
      emit(k, "kl_bound_fixed", theorem_fixed_bound(k, *ex.kl0, ex.schedule.eta, c));
    }
    if (lapd && !fixed && k >= ex.schedule.k0) {
      emit(k, "kl_bound_varying", theorem_varying_bound(k, ex.schedule.k0, c));
    }
    std::vector<double> coord0(state.n_chains());
    for (std::size_t i = 0; i < coord0.size(); ++i) coord0[i] = state.positions(static_cast<Eigen::Index>(i), 0);
    emit(k, "kl_hist1d", hist_kl_1d(coord0, reference_coord0, cfg.metrics.hist_bins));
    if (cfg.metrics.w2_projections > 0) {
      RandomStream projections(cfg.master_seed, kAuxStreamBase - 1);
      emit(k, "sliced_w2",
           sliced_w2(state.positions.topRows(static_cast<Eigen::Index>(n_w2)), reference_w2,
                     cfg.metrics.w2_projections, projections));
    }
    if (!block.empty() && state.n_chains() >= 2) {
      const GaussianMoments emp = empirical_moments(state.positions, block);
      emit(k, "coord_var_bias", (emp.var.array() - block_var).mean());
    }
  };

  ChainState state = make_chain_state(cfg.n_chains, cfg.init.mean, cfg.init.std, cfg.master_seed);
  RunOptions options{.sampler = cfg.sampler,
                     .n_steps = cfg.n_steps,
                     .callback_every = cfg.metric_every,
                     .noise = Noise::Gaussian};
  run_chain(state, target, ex.schedule, options, on_checkpoint);
  return summary;
}

std::vector<SweepPoint> plan_sweep(const Json& doc, SweepAxis axis,
                                   const std::filesystem::path& base_dir) {
  const std::string name = axis_name(axis);
  const auto sweep = doc.find("sweep");
  if (sweep == doc.end() || !sweep->is_object() || !sweep->contains(name)) {
    throw ConfigError("sweep." + name + ": missing axis values");
  }
  const Json& values = (*sweep)[name];
  if (!values.is_array() || values.empty()) {
    throw ConfigError("sweep." + name + ": expected a non-empty array");
  }

  std::vector<SweepPoint> points;
  switch (axis) {
    case SweepAxis::Dimension:
      for (const Json& v : values) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
          throw ConfigError("sweep.dimension: expected positive integers");
        }
        Json d = doc;
        d["target"]["dim"] = v;
        points.push_back({d, std::to_string(v.get<std::int64_t>())});
      }
      break;
    case SweepAxis::Eta: {
      const ExperimentConfig base = parse_config(doc, base_dir);
      if (base.schedule.kind != ScheduleKind::Fixed) {
        throw ConfigError("sweep.eta: requires schedule.kind = fixed");
      }
      Json base_doc = doc;
      if (base_doc.contains("schedule")) base_doc["schedule"].erase("eta");
      const double eta_hat = resolve_experiment(parse_config(base_doc, base_dir)).schedule.eta_hat;
      for (const Json& v : values) {
        double eta = 0.0;
        if (v.is_number()) {
          eta = v.get<double>();
        } else if (v.is_string()) {
          const std::string s = v.get<std::string>();
          if (s == "eta_hat") {
            eta = eta_hat;
          } else if (s.rfind("eta_hat/", 0) == 0) {
            double divisor = 0.0;
            try {
              divisor = std::stod(s.substr(8));
            } catch (const std::exception&) {
              throw ConfigError("sweep.eta: bad divisor in \"" + s + "\"");
            }
            if (!(divisor > 0.0)) throw ConfigError("sweep.eta: divisor must be > 0");
            eta = eta_hat / divisor;
          } else {
            throw ConfigError("sweep.eta: expected a number or \"eta_hat[/N]\", got \"" + s + "\"");
          }
        } else {
          throw ConfigError("sweep.eta: expected numbers or strings");
        }
        Json d = doc;
        d["schedule"]["eta"] = eta;
        points.push_back({d, format_double(eta)});
      }
      break;
    }
    case SweepAxis::Schedule:
      for (const Json& v : values) {
        if (!v.is_string()) throw ConfigError("sweep.schedule: expected \"fixed\" or \"varying\"");
        Json d = doc;
        d["schedule"]["kind"] = v;
        if (v.get<std::string>() == "varying") d["schedule"].erase("eta");
        points.push_back({d, v.get<std::string>()});
      }
      break;
  }
  return points;
}

std::vector<RunSummary> run_sweep(const Json& doc, SweepAxis axis,
                                  const std::filesystem::path& base_dir, const RecordSink& sink) {
  const auto points = plan_sweep(doc, axis, base_dir);
  // Parse and resolve everything up front so a bad point fails before any output.
  std::vector<ExperimentConfig> configs;
  configs.reserve(points.size());
  for (const auto& p : points) {
    configs.push_back(parse_config(p.document, base_dir));
    resolve_experiment(configs.back());
  }
  std::vector<RunSummary> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back(run_experiment(configs[i], std::to_string(i), points[i].axis_value, sink));
  }
  return out;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream os;
  os << "run " << s.run_id;
  if (!s.axis_value.empty()) os << " axis_value=" << s.axis_value;
  os << " d=" << s.d << " m=" << format_double(s.constants.m)
     << " L=" << format_double(s.constants.L) << " tr_h=" << format_double(s.constants.tr_h)
     << " tr_h_sqrt=" << format_double(s.constants.tr_h_sqrt)
     << " alpha_star=" << format_double(s.constants.alpha_star)
     << " eta_hat=" << format_double(s.eta_hat) << " eta=" << format_double(s.eta_first)
     << " k0=" << s.k0;
  if (s.kl0) os << " kl0=" << format_double(*s.kl0);
  os << " config_hash=" << s.config_hash;
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out) : out_(out) {}

void CsvWriter::write_header() { out_ << "run_id,k,metric,value,d,axis_value,config_hash,seed\r\n"; }

void CsvWriter::write(const ExperimentRecord& r) {
  out_ << csv_field(r.run_id) << ',' << r.k << ',' << csv_field(r.metric) << ','
       << format_double(r.value) << ',' << r.d << ',' << csv_field(r.axis_value) << ','
       << csv_field(r.config_hash) << ',' << r.seed << "\r\n";
}

}  // namespace lapd::harness
