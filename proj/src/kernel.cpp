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

#include "lapd/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lapd/parallel.hpp"
#include "lapd/schedule.hpp"

namespace lapd {

TransitionKernel::TransitionKernel(const Target& target, double eta)
    : TransitionKernel(target, eta, coupled_eta_tilde(eta, target.m())) {}

TransitionKernel::TransitionKernel(const Target& target, double eta, double eta_tilde)
    : target_(&target), m_(target.m()), eta_(eta), eta_tilde_(eta_tilde) {
  if (!(eta > 0.0)) throw std::invalid_argument("kernel: eta must be > 0");
  if (!(eta_tilde >= 0.0)) throw std::invalid_argument("kernel: eta_tilde must be >= 0");
  if (!(m_ > 0.0)) throw std::invalid_argument("kernel: m must be > 0");
  var_scalar_ = -std::expm1(-2.0 * m_ * eta_) / m_;
}

Vector TransitionKernel::mean_map(const Vector& w0) const {
  const Vector g = target_->grad_f(w0);
  return (w0 - eta_tilde_ * g) * std::exp(-m_ * eta_);
}

InterpolatingSde InterpolatingSde::from_kernel(const TransitionKernel& kernel, const Vector& w0) {
  return {.m = kernel.m(),
          .eta = kernel.eta(),
          .eta_tilde = kernel.eta_tilde(),
          .anchor_gradient = kernel.target().grad_f(w0)};
}

double InterpolatingSde::anchor_coefficient() const {
  return m * eta_tilde / std::expm1(m * eta);
}

Vector kernel_mean(const TransitionKernel& kernel, const Vector& w0, double t) {
  if (!(t >= 0.0) || t > kernel.eta()) {
    throw std::invalid_argument("kernel_mean: t must lie in [0, eta]");
  }
  const InterpolatingSde sde = InterpolatingSde::from_kernel(kernel, w0);
  const double m = kernel.m();
  return std::exp(-m * t) * w0 +
         (std::expm1(-m * t) / m) * sde.anchor_coefficient() * sde.anchor_gradient;
}

double transition_log_density(const TransitionKernel& kernel, const Vector& w, const Vector& w0) {
  if (w.size() != w0.size() || static_cast<std::size_t>(w.size()) != kernel.dims()) {
    throw std::invalid_argument("transition_log_density: dimension mismatch");
  }
  const double c = kernel.var_scalar();
  const double d = static_cast<double>(w.size());
  const double r2 = (w - kernel.mean_map(w0)).squaredNorm();
  return -0.5 * d * std::log(2.0 * std::numbers::pi * c) - r2 / (2.0 * c);
}

Vector kernel_sample(const TransitionKernel& kernel, const Vector& w0, RandomStream& stream) {
  Vector out = kernel.mean_map(w0);
  const double sd = std::sqrt(kernel.var_scalar());
  for (Eigen::Index c = 0; c < out.size(); ++c) out[c] += sd * stream.normal();
  return out;
}

Positions em_simulate(const InterpolatingSde& sde, const Vector& w0, double h,
                      std::size_t n_paths, std::uint64_t seed) {
  if (!(h > 0.0)) throw std::invalid_argument("em_simulate: h must be > 0");
  const double ratio = sde.eta / h;
  const double n_steps_real = std::round(ratio);
  if (n_steps_real < 1.0 || std::abs(n_steps_real * h - sde.eta) > 1e-12 * std::max(1.0, sde.eta)) {
    throw std::invalid_argument("em_simulate: h must divide eta");
  }
  if (sde.anchor_gradient.size() != w0.size()) {
    throw std::invalid_argument("em_simulate: dimension mismatch");
  }
  const auto n_steps = static_cast<std::int64_t>(n_steps_real);
  const Eigen::Index d = w0.size();
  const Vector shift = sde.anchor_coefficient() * sde.anchor_gradient;
  const double noise_sd = std::sqrt(2.0 * h);
  Positions out(static_cast<Eigen::Index>(n_paths), d);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RandomStream rng(seed, static_cast<std::uint64_t>(p));
      auto row = out.row(static_cast<Eigen::Index>(p));
      row = w0.transpose();
      for (std::int64_t s = 0; s < n_steps; ++s) {
        for (Eigen::Index c = 0; c < d; ++c) {
          row[c] += -h * (sde.m * row[c] + shift[c]) + noise_sd * rng.normal();
        }
      }
    }
  });
  return out;
}

}  // namespace lapd
