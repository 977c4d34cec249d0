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

#ifndef LAPD_METRICS_HPP
#define LAPD_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "lapd/random.hpp"
#include "lapd/sampler.hpp"
#include "lapd/targets.hpp"

namespace lapd {

/// Diagonal Gaussian N(mean, diag(var)).
struct GaussianMoments {
  Vector mean;
  Vector var;

  static GaussianMoments isotropic(const Vector& mean, double var) {
    return {mean, Vector::Constant(mean.size(), var)};
  }
};

/// One row of the fixed-step bound check; negative slack is kept, not clipped.
struct BoundEvaluation {
  std::int64_t k = 0;
  double bound_value = 0.0;
  double measured = 0.0;
  double slack = 0.0;
};

/**
 * Exact law after one LAPD iteration on f = (λ/2)|w|² started from `mom`:
 * stage 1 scales by (1 - η̃λ), stage 2 scales by e^{-mη} and adds
 * (1 - e^{-2mη})/m of variance.
 */
GaussianMoments gaussian_chain_advance(const GaussianMoments& mom, double lambda, double m,
                                       double eta, double eta_tilde);

/// Exact law after one ULA step on U = ((λ + m)/2)|w|².
GaussianMoments ula_gaussian_advance(const GaussianMoments& mom, double lambda, double m,
                                     double eta);

/// KL(p || q) for diagonal Gaussians.
double gaussian_kl(const GaussianMoments& p, const GaussianMoments& q);

/// e^{-α* η k} KL₀ + (32 η / α*) Tr(H)
double theorem_fixed_bound(std::int64_t k, double kl0, double eta, const TargetConstants& c);

/// 2^10 Tr(H) / (27 L^{1.5} α* + 6 (k - T₀) α*²), as printed; requires k ≥ T₀.
double theorem_varying_bound(std::int64_t k, std::int64_t t0, const TargetConstants& c);

/// KL between add-one-smoothed histograms over the pooled sample range.
double hist_kl_1d(std::span<const double> samples_p, std::span<const double> samples_q,
                  int n_bins = 64);

/// Sliced Wasserstein-2 distance with directions drawn uniformly on the
/// sphere from `stream`. Rows are samples; both sets must have equal size.
double sliced_w2(const Positions& samples_p, const Positions& samples_q, int n_projections,
                 RandomStream& stream);

/// Per-coordinate empirical mean and (unbiased) variance of the listed columns.
GaussianMoments empirical_moments(const Positions& positions, std::span<const std::size_t> coords);

}  // namespace lapd

#endif  // LAPD_METRICS_HPP
