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

#ifndef LAPD_KERNEL_HPP
#define LAPD_KERNEL_HPP

#include <cstdint>

#include "lapd/random.hpp"
#include "lapd/sampler.hpp"
#include "lapd/targets.hpp"

namespace lapd {

/**
 * Gaussian law of one LAPD iteration conditioned on the previous particle:
 *
 *   w | w0 ~ N( (w0 - η̃ ∇f(w0)) e^{-mη},  (1 - e^{-2mη})/m · I ).
 *
 * The covariance is isotropic and kept as a scalar.
 */
class TransitionKernel {
 public:
  /// η̃ from the step coupling.
  TransitionKernel(const Target& target, double eta);
  /// Explicit η̃ (η̃ = 0 gives the pure OU kernel).
  TransitionKernel(const Target& target, double eta, double eta_tilde);

  double m() const noexcept { return m_; }
  double eta() const noexcept { return eta_; }
  double eta_tilde() const noexcept { return eta_tilde_; }
  double var_scalar() const noexcept { return var_scalar_; }
  std::size_t dims() const noexcept { return target_->dim(); }
  const Target& target() const noexcept { return *target_; }

  Vector mean_map(const Vector& w0) const;

 private:
  const Target* target_;
  double m_;
  double eta_;
  double eta_tilde_;
  double var_scalar_;
};

/**
 * Affine SDE whose time-η marginal equals one LAPD iteration:
 *   dŵ = -(m ŵ + c ∇f(w0)) dt + √2 dB,   c = m η̃ / (e^{mη} - 1).
 */
struct InterpolatingSde {
  double m = 1.0;
  double eta = 0.0;
  double eta_tilde = 0.0;
  Vector anchor_gradient;

  static InterpolatingSde from_kernel(const TransitionKernel& kernel, const Vector& w0);

  /// c above; exactly 1 when η̃ is the coupled value.
  double anchor_coefficient() const;
};

/// Mean of the interpolating SDE at time t ∈ [0, η]:
///   e^{-mt} w0 - c (1 - e^{-mt})/m ∇f(w0).
Vector kernel_mean(const TransitionKernel& kernel, const Vector& w0, double t);

/// log p(w | w0) = -(d/2) ln(2π c) - |w - mean_map(w0)|² / (2c), c = var_scalar.
double transition_log_density(const TransitionKernel& kernel, const Vector& w, const Vector& w0);

/// One exact draw mean_map(w0) + sqrt(var_scalar) ξ, ξ taken from `stream`.
Vector kernel_sample(const TransitionKernel& kernel, const Vector& w0, RandomStream& stream);

/**
 * Euler-Maruyama paths of the interpolating SDE from w0 to time η with
 * substep h, which must divide η. Path i uses stream (seed, i). Returns the
 * terminal positions, one path per row.
 */
Positions em_simulate(const InterpolatingSde& sde, const Vector& w0, double h,
                      std::size_t n_paths, std::uint64_t seed);

}  // namespace lapd

#endif  // LAPD_KERNEL_HPP
