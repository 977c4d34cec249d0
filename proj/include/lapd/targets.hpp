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

#ifndef LAPD_TARGETS_HPP
#define LAPD_TARGETS_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "lapd/random.hpp"

namespace lapd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * Spectral constants of a target p* ∝ exp(-f - g), g(w) = (m/2)|w|^2.
 *
 *   m          strong-convexity coefficient of the prior term g
 *   L          uniform spectral bound on the Hessian of f
 *   tr_h       Tr(H), H a uniform PSD bound on (∇²f)(∇²f)ᵀ
 *   tr_h_sqrt  Tr(H^{1/2})
 *   alpha_star log-Sobolev constant of p*
 *
 * L = 0 is admitted only for targets whose f has zero curvature bound
 * (tr_h = tr_h_sqrt = 0); step-size rules then drop the L term.
 */
struct TargetConstants {
  double m = 1.0;
  double L = 0.0;
  double tr_h = 0.0;
  double tr_h_sqrt = 0.0;
  double alpha_star = 1.0;

  /// Throws InvariantViolation naming the offending field.
  void validate(std::size_t dim) const;
};

/// f(w) = (λ/2)|w|^2; the target is N(0, (m+λ)^{-1} I).
class QuadraticTarget {
 public:
  QuadraticTarget(double lambda, std::size_t dim, double m = 1.0);

  double lambda() const noexcept { return lambda_; }
  std::size_t dim() const noexcept { return dim_; }
  double m() const noexcept { return m_; }

  double f(std::span<const double> w) const;
  void grad_f(std::span<const double> w, std::span<double> out) const;
  Matrix hessian_f(std::span<const double> w) const;
  TargetConstants constants() const;
  void sample(RandomStream& stream, std::span<double> out) const;

 private:
  double lambda_;
  std::size_t dim_;
  double m_;
};

/// Result of h_half: the PSD bound H^{1/2} and the two traces derived from it.
struct HHalf {
  Matrix matrix;
  double trace = 0.0;     // Tr(H^{1/2})
  double trace_sq = 0.0;  // Tr(H) = Tr((H^{1/2})^2)
};

/**
 * Equal-weight mixture of K unit-covariance Gaussians, written as
 * f(w) = -ln[(1/K) Σ exp(μ_iᵀw - |μ_i|²/2)] plus the prior g(w) = (m/2)|w|².
 * With the default m = 1 the target is (1/K) Σ N(μ_i, I).
 */
class GaussianMixtureTarget {
 public:
  /// `means` is K x d, one component mean per row.
  explicit GaussianMixtureTarget(Matrix means, double alpha_star = 0.1, double m = 1.0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(means_.cols()); }
  std::size_t components() const noexcept { return static_cast<std::size_t>(means_.rows()); }
  const Matrix& means() const noexcept { return means_; }
  double m() const noexcept { return m_; }
  double alpha_star() const noexcept { return alpha_star_; }
  /// max_i |μ_i|
  double r_mu() const noexcept { return r_mu_; }

  double f(std::span<const double> w) const;
  void grad_f(std::span<const double> w, std::span<double> out) const;
  Matrix hessian_f(std::span<const double> w) const;
  const HHalf& h_half() const noexcept { return h_half_; }
  TargetConstants constants() const;
  void sample(RandomStream& stream, std::span<double> out) const;

 private:
  // Softmax weights of the shifted logits μ_iᵀw - |μ_i|²/2, written to `weights`
  // (size K). Returns the log-sum-exp of the logits.
  double softmax(std::span<const double> w, std::span<double> weights) const;

  Matrix means_;
  Vector half_sq_norms_;
  Vector sample_log_weights_;
  double alpha_star_;
  double m_;
  double r_mu_ = 0.0;
  HHalf h_half_;
  double spectral_bound_ = 0.0;
};

/// H^{1/2} = Σ_{i<j} (μ_i - μ_j)(μ_i - μ_j)ᵀ with its traces.
HHalf h_half(const Matrix& means);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_lambda_max(const Matrix& a, int max_steps = 50, double tol = 1e-10);

/**
 * Immutable target handle shared across chains. All member functions are
 * pure in (target, w) and safe to call concurrently.
 */
class Target {
 public:
  Target(QuadraticTarget t) : model_(std::move(t)) {}  // NOLINT(google-explicit-constructor)
  Target(GaussianMixtureTarget t) : model_(std::move(t)) {}  // NOLINT(google-explicit-constructor)

  std::size_t dim() const;
  double m() const;
  bool is_quadratic() const noexcept { return std::holds_alternative<QuadraticTarget>(model_); }
  const QuadraticTarget* quadratic() const noexcept { return std::get_if<QuadraticTarget>(&model_); }
  const GaussianMixtureTarget* mixture() const noexcept {
    return std::get_if<GaussianMixtureTarget>(&model_);
  }

  double f(std::span<const double> w) const;
  double U(std::span<const double> w) const;

  // Unchecked hot-path forms; `out` must have dim() entries.
  void grad_f(std::span<const double> w, std::span<double> out) const;
  void grad_U(std::span<const double> w, std::span<double> out) const;

  // Checked forms: throw std::invalid_argument on dimension mismatch or
  // non-finite input.
  Vector grad_f(const Vector& w) const;
  Vector grad_U(const Vector& w) const;
  Matrix hessian_f(const Vector& w) const;

  TargetConstants constants() const;

  /// One exact draw from p*.
  void sample(RandomStream& stream, std::span<double> out) const;

  /**
   * Coordinates in which p* is an independent centred Gaussian and ∇f has
   * no component: every coordinate for a quadratic target, and the
   * coordinates where all mixture means vanish.
   */
  std::vector<std::size_t> gaussian_block() const;
  /// Curvature of f inside the Gaussian block (λ, or 0 for mixtures).
  double gaussian_block_lambda() const;
  /// Variance of p* along each Gaussian-block coordinate.
  double gaussian_block_variance() const;

 private:
  void check_point(const Vector& w) const;

  std::variant<QuadraticTarget, GaussianMixtureTarget> model_;
};

}  // namespace lapd

#endif  // LAPD_TARGETS_HPP
