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

#ifndef LAPD_SAMPLER_HPP
#define LAPD_SAMPLER_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lapd/random.hpp"
#include "lapd/schedule.hpp"
#include "lapd/targets.hpp"

namespace lapd {

using Positions = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Ensemble of independent chains. Row i of `positions` is chain i and is
/// driven only by streams[i].
struct ChainState {
  Positions positions;
  std::int64_t k = 0;
  std::vector<RandomStream> streams;

  std::size_t n_chains() const noexcept { return static_cast<std::size_t>(positions.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(positions.cols()); }
  std::span<double> chain(std::size_t i) noexcept {
    return {positions.row(static_cast<Eigen::Index>(i)).data(), dim()};
  }
  std::span<const double> chain(std::size_t i) const noexcept {
    return {positions.row(static_cast<Eigen::Index>(i)).data(), dim()};
  }
};

/// Chains drawn from N(init_mean, init_std² I), each from its own stream
/// (master_seed, i).
ChainState make_chain_state(std::size_t n_chains, const Vector& init_mean, double init_std,
                            std::uint64_t master_seed);

/// Gaussian draws normally; Zero turns stage 2 / ULA into their drift-only maps.
enum class Noise { Gaussian, Zero };

enum class SamplerKind { Lapd, Ula };

/// Step sizes used by one LAPD iteration.
struct StepInfo {
  double eta = 0.0;
  double eta_tilde = 0.0;
};

/// Stage 1: w <- w - η̃ ∇f(w) for every chain.
void lapd_stage1(ChainState& state, const Target& target, double eta_tilde);

/// Stage 2: exact OU flow of the prior for time η,
/// w <- e^{-mη} w + sqrt((1 - e^{-2mη})/m) ξ.
void lapd_stage2_exact(ChainState& state, double m, double eta, Noise noise = Noise::Gaussian);

/// One LAPD iteration with η = schedule.step_size(k) and η̃ from the step
/// coupling; increments k.
StepInfo lapd_step(ChainState& state, const Target& target, const ScheduleSpec& schedule,
                   Noise noise = Noise::Gaussian);

/// Euler-Maruyama on U: w <- w - η ∇U(w) + sqrt(2η) ξ; increments k.
void ula_step(ChainState& state, const Target& target, double eta, Noise noise = Noise::Gaussian);

using ChainCallback = std::function<void(const ChainState&)>;

struct RunOptions {
  SamplerKind sampler = SamplerKind::Lapd;
  std::int64_t n_steps = 0;
  std::int64_t callback_every = 1;
  Noise noise = Noise::Gaussian;
};

/// Advances `state` by n_steps iterations. The callback sees the state at
/// every multiple of callback_every (counted from the start, step 0 included).
void run_chain(ChainState& state, const Target& target, const ScheduleSpec& schedule,
               const RunOptions& options, const ChainCallback& callback = {});

}  // namespace lapd

#endif  // LAPD_SAMPLER_HPP
