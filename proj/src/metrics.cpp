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

#include "lapd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lapd {

GaussianMoments gaussian_chain_advance(const GaussianMoments& mom, double lambda, double m,
                                       double eta, double eta_tilde) {
  const double shrink = 1.0 - eta_tilde * lambda;
  const double decay = std::exp(-m * eta);
  const double injected = -std::expm1(-2.0 * m * eta) / m;
  GaussianMoments out;
  out.mean = decay * shrink * mom.mean;
  out.var = (decay * decay * shrink * shrink) * mom.var.array() + injected;
  return out;
}

GaussianMoments ula_gaussian_advance(const GaussianMoments& mom, double lambda, double m,
                                     double eta) {
  const double a = 1.0 - eta * (lambda + m);
  GaussianMoments out;
  out.mean = a * mom.mean;
  out.var = (a * a) * mom.var.array() + 2.0 * eta;
  return out;
}

double gaussian_kl(const GaussianMoments& p, const GaussianMoments& q) {
  if (p.mean.size() != q.mean.size() || p.var.size() != p.mean.size() ||
      q.var.size() != q.mean.size()) {
    throw std::invalid_argument("gaussian_kl: dimension mismatch");
  }
  if ((p.var.array() <= 0.0).any() || (q.var.array() <= 0.0).any()) {
    throw std::invalid_argument("gaussian_kl: variances must be > 0");
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.mean.size(); ++i) {
    const double ratio = p.var[i] / q.var[i];
    const double shift = p.mean[i] - q.mean[i];
    // ratio - 1 - ln(ratio) loses all precision near ratio = 1 unless written
    // through log1p.
    const double x = ratio - 1.0;
    kl += 0.5 * (x - std::log1p(x)) + shift * shift / (2.0 * q.var[i]);
  }
  return kl;
}

double theorem_fixed_bound(std::int64_t k, double kl0, double eta, const TargetConstants& c) {
  return std::exp(-c.alpha_star * eta * static_cast<double>(k)) * kl0 +
         32.0 * eta / c.alpha_star * c.tr_h;
}

double theorem_varying_bound(std::int64_t k, std::int64_t t0, const TargetConstants& c) {
  if (k < t0) throw std::invalid_argument("theorem_varying_bound: k must be >= t0");
  const double a = c.alpha_star;
  return 1024.0 * c.tr_h /
         (27.0 * std::pow(c.L, 1.5) * a + 6.0 * static_cast<double>(k - t0) * a * a);
}

double hist_kl_1d(std::span<const double> samples_p, std::span<const double> samples_q,
                  int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("hist_kl_1d: n_bins must be >= 2");
  if (samples_p.empty() || samples_q.empty()) {
    throw std::invalid_argument("hist_kl_1d: sample sets must be non-empty");
  }
  const auto [p_lo, p_hi] = std::minmax_element(samples_p.begin(), samples_p.end());
  const auto [q_lo, q_hi] = std::minmax_element(samples_q.begin(), samples_q.end());
  const double lo = std::min(*p_lo, *q_lo);
  const double hi = std::max(*p_hi, *q_hi);
  const double width = (hi - lo) / n_bins;

  auto histogram = [&](std::span<const double> xs) {
    std::vector<double> counts(static_cast<std::size_t>(n_bins), 1.0);
    for (double x : xs) {
      int bin = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
      bin = std::clamp(bin, 0, n_bins - 1);
      counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    const double total = static_cast<double>(xs.size()) + n_bins;
    for (double& c : counts) c /= total;
    return counts;
  };
  const auto hp = histogram(samples_p);
  const auto hq = histogram(samples_q);
  double kl = 0.0;
  for (std::size_t b = 0; b < hp.size(); ++b) kl += hp[b] * std::log(hp[b] / hq[b]);
  return kl;
}

double sliced_w2(const Positions& samples_p, const Positions& samples_q, int n_projections,
                 RandomStream& stream) {
  if (samples_p.rows() != samples_q.rows()) {
    throw std::invalid_argument("sliced_w2: sample sets must have equal counts");
  }
  if (samples_p.cols() != samples_q.cols()) {
    throw std::invalid_argument("sliced_w2: dimension mismatch");
  }
  if (n_projections < 1) throw std::invalid_argument("sliced_w2: need at least one projection");
  const Eigen::Index n = samples_p.rows();
  const Eigen::Index d = samples_p.cols();
  if (n == 0) return 0.0;
  Vector theta(d);
  std::vector<double> proj_p(static_cast<std::size_t>(n));
  std::vector<double> proj_q(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int j = 0; j < n_projections; ++j) {
    do {
      for (Eigen::Index c = 0; c < d; ++c) theta[c] = stream.normal();
    } while (theta.squaredNorm() == 0.0);
    theta.normalize();
    for (Eigen::Index i = 0; i < n; ++i) {
      proj_p[static_cast<std::size_t>(i)] = samples_p.row(i).dot(theta.transpose());
      proj_q[static_cast<std::size_t>(i)] = samples_q.row(i).dot(theta.transpose());
    }
    std::sort(proj_p.begin(), proj_p.end());
    std::sort(proj_q.begin(), proj_q.end());
    double sq = 0.0;
    for (std::size_t i = 0; i < proj_p.size(); ++i) {
      const double diff = proj_p[i] - proj_q[i];
      sq += diff * diff;
    }
    total += sq / static_cast<double>(n);
  }
  return std::sqrt(total / n_projections);
}

GaussianMoments empirical_moments(const Positions& positions, std::span<const std::size_t> coords) {
  const Eigen::Index n = positions.rows();
  if (n < 2) throw std::invalid_argument("empirical_moments: need at least two samples");
  GaussianMoments out;
  out.mean.resize(static_cast<Eigen::Index>(coords.size()));
  out.var.resize(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const auto col = positions.col(static_cast<Eigen::Index>(coords[j]));
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    out.mean[static_cast<Eigen::Index>(j)] = mean;
    out.var[static_cast<Eigen::Index>(j)] = ss / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace lapd
