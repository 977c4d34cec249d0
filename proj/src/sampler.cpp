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

#include "lapd/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lapd/parallel.hpp"

namespace lapd {

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite ") + what);
  }
}

struct OuCoefficients {
  double decay;  // e^{-mη}
  double sd;     // sqrt((1 - e^{-2mη})/m)
};

OuCoefficients ou_coefficients(double m, double eta) {
  return {std::exp(-m * eta), std::sqrt(-std::expm1(-2.0 * m * eta) / m)};
}

}  // namespace

ChainState make_chain_state(std::size_t n_chains, const Vector& init_mean, double init_std,
                            std::uint64_t master_seed) {
  if (n_chains == 0) throw std::invalid_argument("need at least one chain");
  if (!(init_std >= 0.0)) throw std::invalid_argument("init_std must be >= 0");
  const auto d = init_mean.size();
  ChainState state;
  state.positions.resize(static_cast<Eigen::Index>(n_chains), d);
  state.streams.reserve(n_chains);
  for (std::size_t i = 0; i < n_chains; ++i) {
    state.streams.emplace_back(master_seed, static_cast<std::uint64_t>(i));
  }
  parallel_for(n_chains, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto w = state.chain(i);
      for (Eigen::Index c = 0; c < d; ++c) {
        w[static_cast<std::size_t>(c)] = init_mean[c] + init_std * state.streams[i].normal();
      }
    }
  });
  return state;
}

void lapd_stage1(ChainState& state, const Target& target, double eta_tilde) {
  if (!(eta_tilde >= 0.0)) throw std::invalid_argument("stage 1: eta_tilde must be >= 0");
  if (eta_tilde == 0.0) return;
  const std::size_t d = state.dim();
  parallel_for(state.n_chains(), [&](std::size_t begin, std::size_t end) {
    Vector grad(static_cast<Eigen::Index>(d));
    std::span<double> g(grad.data(), d);
    for (std::size_t i = begin; i < end; ++i) {
      auto w = state.chain(i);
      target.grad_f(w, g);
      check_finite(g, "gradient in stage 1");
      for (std::size_t c = 0; c < d; ++c) w[c] -= eta_tilde * g[c];
    }
  });
}

void lapd_stage2_exact(ChainState& state, double m, double eta, Noise noise) {
  if (!(m > 0.0) || !(eta > 0.0)) throw std::invalid_argument("stage 2: m and eta must be > 0");
  const auto ou = ou_coefficients(m, eta);
  const std::size_t d = state.dim();
  parallel_for(state.n_chains(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto w = state.chain(i);
      auto& rng = state.streams[i];
      if (noise == Noise::Zero) {
        for (std::size_t c = 0; c < d; ++c) w[c] = ou.decay * w[c];
      } else {
        for (std::size_t c = 0; c < d; ++c) w[c] = ou.decay * w[c] + ou.sd * rng.normal();
      }
    }
  });
}

StepInfo lapd_step(ChainState& state, const Target& target, const ScheduleSpec& schedule,
                   Noise noise) {
  const double m = target.m();
  StepInfo info;
  info.eta = schedule.step_size(state.k);
  info.eta_tilde = coupled_eta_tilde(info.eta, m);
  const auto ou = ou_coefficients(m, info.eta);
  const std::size_t d = state.dim();
  // Both stages fused per chain; the arithmetic is identical to calling
  // lapd_stage1 followed by lapd_stage2_exact.
  parallel_for(state.n_chains(), [&](std::size_t begin, std::size_t end) {
    Vector grad(static_cast<Eigen::Index>(d));
    std::span<double> g(grad.data(), d);
    for (std::size_t i = begin; i < end; ++i) {
      auto w = state.chain(i);
      auto& rng = state.streams[i];
      target.grad_f(w, g);
      check_finite(g, "gradient in stage 1");
      if (noise == Noise::Zero) {
        for (std::size_t c = 0; c < d; ++c) w[c] = ou.decay * (w[c] - info.eta_tilde * g[c]);
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          w[c] = ou.decay * (w[c] - info.eta_tilde * g[c]) + ou.sd * rng.normal();
        }
      }
    }
  });
  ++state.k;
  return info;
}

void ula_step(ChainState& state, const Target& target, double eta, Noise noise) {
  if (!(eta > 0.0)) throw std::invalid_argument("ula_step: eta must be > 0");
  const double noise_sd = std::sqrt(2.0 * eta);
  const std::size_t d = state.dim();
  parallel_for(state.n_chains(), [&](std::size_t begin, std::size_t end) {
    Vector grad(static_cast<Eigen::Index>(d));
    std::span<double> g(grad.data(), d);
    for (std::size_t i = begin; i < end; ++i) {
      auto w = state.chain(i);
      auto& rng = state.streams[i];
      target.grad_U(w, g);
      check_finite(g, "gradient in ULA step");
      for (std::size_t c = 0; c < d; ++c) {
        w[c] -= eta * g[c];
        if (noise == Noise::Gaussian) w[c] += noise_sd * rng.normal();
      }
    }
  });
  ++state.k;
}

void run_chain(ChainState& state, const Target& target, const ScheduleSpec& schedule,
               const RunOptions& options, const ChainCallback& callback) {
  if (options.n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  if (options.callback_every < 1) throw std::invalid_argument("callback_every must be >= 1");
  if (callback) callback(state);
  for (std::int64_t step = 1; step <= options.n_steps; ++step) {
    if (options.sampler == SamplerKind::Lapd) {
      lapd_step(state, target, schedule, options.noise);
    } else {
      ula_step(state, target, schedule.step_size(state.k), options.noise);
    }
    if (callback && step % options.callback_every == 0) callback(state);
  }
}

}  // namespace lapd
