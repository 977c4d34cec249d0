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

#include "lapd/targets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lapd/errors.hpp"

namespace lapd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool all_finite(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
}

// Mixtures rarely have more than a handful of components; avoid a heap
// allocation per gradient call in that case.
constexpr std::size_t kInlineComponents = 32;

}  // namespace

void TargetConstants::validate(std::size_t dim) const {
  auto fail = [](const std::string& msg) { throw InvariantViolation(msg); };
  if (!(m > 0.0) || !std::isfinite(m)) fail("constants.m must be > 0");
  if (!(alpha_star > 0.0) || !std::isfinite(alpha_star)) fail("constants.alpha_star must be > 0");
  if (!(L >= 0.0) || !std::isfinite(L)) fail("constants.L must be >= 0");
  if (!(tr_h >= 0.0) || !(tr_h_sqrt >= 0.0)) fail("constants.tr_h and tr_h_sqrt must be >= 0");
  if (L == 0.0 && (tr_h > 0.0 || tr_h_sqrt > 0.0)) {
    fail("constants.L must be > 0 when Tr(H) > 0");
  }
  const double d = static_cast<double>(dim);
  const double slack = 1e-9;
  if (tr_h > L * L * d * (1.0 + slack) + slack) fail("constants.tr_h exceeds L^2 d");
  if (tr_h_sqrt > L * d * (1.0 + slack) + slack) fail("constants.tr_h_sqrt exceeds L d");
  if (tr_h > tr_h_sqrt * tr_h_sqrt * (1.0 + slack) + slack) {
    fail("constants.tr_h exceeds tr_h_sqrt^2");
  }
}

// ---------------------------------------------------------------------------
// QuadraticTarget

QuadraticTarget::QuadraticTarget(double lambda, std::size_t dim, double m)
    : lambda_(lambda), dim_(dim), m_(m) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("quadratic target: lambda must be >= 0");
  }
  if (dim == 0) throw std::invalid_argument("quadratic target: dim must be >= 1");
}

double QuadraticTarget::f(std::span<const double> w) const {
  double s = 0.0;
  for (double x : w) s += x * x;
  return 0.5 * lambda_ * s;
}

void QuadraticTarget::grad_f(std::span<const double> w, std::span<double> out) const {
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = lambda_ * w[i];
}

Matrix QuadraticTarget::hessian_f(std::span<const double> /*w*/) const {
  return lambda_ * Matrix::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
}

TargetConstants QuadraticTarget::constants() const {
  const double d = static_cast<double>(dim_);
  return {.m = m_,
          .L = lambda_,
          .tr_h = lambda_ * lambda_ * d,
          .tr_h_sqrt = lambda_ * d,
          .alpha_star = m_ + lambda_};
}

void QuadraticTarget::sample(RandomStream& stream, std::span<double> out) const {
  const double sd = 1.0 / std::sqrt(m_ + lambda_);
  for (double& x : out) x = sd * stream.normal();
}

// ---------------------------------------------------------------------------
// GaussianMixtureTarget

HHalf h_half(const Matrix& means) {
  const Eigen::Index k = means.rows();
  const Eigen::Index d = means.cols();
  HHalf out;
  out.matrix = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const Vector diff = (means.row(i) - means.row(j)).transpose();
      out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    }
  }
  out.matrix = out.matrix.selfadjointView<Eigen::Lower>();
  out.trace = out.matrix.trace();
  out.trace_sq = (out.matrix * out.matrix).trace();
  return out;
}

double power_iteration_lambda_max(const Matrix& a, int max_steps, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.isZero(0.0)) return 0.0;
  Vector v = Vector::Ones(n).normalized();
  if ((a * v).norm() == 0.0) {
    Eigen::Index j = 0;
    a.diagonal().maxCoeff(&j);
    v = Vector::Unit(n, j);
  }
  double lambda = v.dot(a * v);
  for (int step = 0; step < max_steps; ++step) {
    Vector av = a * v;
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    v = av / norm;
    const double next = v.dot(a * v);
    const bool converged = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next));
    lambda = next;
    if (converged) break;
  }
  return lambda;
}

GaussianMixtureTarget::GaussianMixtureTarget(Matrix means, double alpha_star, double m)
    : means_(std::move(means)), alpha_star_(alpha_star), m_(m) {
  if (means_.rows() < 1) throw std::invalid_argument("mixture target: need at least one mean");
  if (means_.cols() < 1) throw std::invalid_argument("mixture target: dim must be >= 1");
  if (!means_.allFinite()) throw std::invalid_argument("mixture target: means must be finite");
  half_sq_norms_ = 0.5 * means_.rowwise().squaredNorm();
  r_mu_ = std::sqrt(2.0 * half_sq_norms_.maxCoeff());
  h_half_ = lapd::h_half(means_);
  spectral_bound_ = power_iteration_lambda_max(h_half_.matrix);
  if (m_ > 0.0) {
    // Exact sampling weights of exp(-f - (m/2)|w|^2): component i is
    // N(μ_i/m, I/m) with log-weight |μ_i|^2 (1/m - 1) / 2.
    sample_log_weights_ = half_sq_norms_ * (1.0 / m_ - 1.0);
  } else {
    sample_log_weights_ = Vector::Zero(means_.rows());
  }
}

double GaussianMixtureTarget::softmax(std::span<const double> w, std::span<double> weights) const {
  const std::size_t k = components();
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      s += means_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) * w[c];
    }
    weights[i] = s - half_sq_norms_[static_cast<Eigen::Index>(i)];
    max_logit = std::max(max_logit, weights[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    weights[i] = std::exp(weights[i] - max_logit);
    total += weights[i];
  }
  for (std::size_t i = 0; i < k; ++i) weights[i] /= total;
  return max_logit + std::log(total);
}

double GaussianMixtureTarget::f(std::span<const double> w) const {
  std::array<double, kInlineComponents> inline_buf{};
  std::vector<double> heap_buf;
  std::span<double> weights;
  if (components() <= kInlineComponents) {
    weights = std::span<double>(inline_buf.data(), components());
  } else {
    heap_buf.resize(components());
    weights = heap_buf;
  }
  const double lse = softmax(w, weights);
  return -(lse - std::log(static_cast<double>(components())));
}

void GaussianMixtureTarget::grad_f(std::span<const double> w, std::span<double> out) const {
  std::array<double, kInlineComponents> inline_buf{};
  std::vector<double> heap_buf;
  std::span<double> weights;
  if (components() <= kInlineComponents) {
    weights = std::span<double>(inline_buf.data(), components());
  } else {
    heap_buf.resize(components());
    weights = heap_buf;
  }
  softmax(w, weights);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < components(); ++i) {
    const double s = weights[i];
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] -= s * means_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
  }
}

Matrix GaussianMixtureTarget::hessian_f(std::span<const double> w) const {
  // ∇²f = s̄ s̄ᵀ - Σ s_i μ_i μ_iᵀ, with s the softmax weights and s̄ = Σ s_i μ_i.
  std::vector<double> weights(components());
  softmax(w, weights);
  const Eigen::Index d = means_.cols();
  Vector mean = Vector::Zero(d);
  for (std::size_t i = 0; i < components(); ++i) {
    mean += weights[i] * means_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  Matrix h = Matrix::Zero(d, d);
  h.selfadjointView<Eigen::Lower>().rankUpdate(mean, 1.0);
  for (std::size_t i = 0; i < components(); ++i) {
    const Vector mu = means_.row(static_cast<Eigen::Index>(i)).transpose();
    h.selfadjointView<Eigen::Lower>().rankUpdate(mu, -weights[i]);
  }
  return h.selfadjointView<Eigen::Lower>();
}

TargetConstants GaussianMixtureTarget::constants() const {
  return {.m = m_,
          .L = spectral_bound_,
          .tr_h = h_half_.trace_sq,
          .tr_h_sqrt = h_half_.trace,
          .alpha_star = alpha_star_};
}

void GaussianMixtureTarget::sample(RandomStream& stream, std::span<double> out) const {
  const Eigen::Index k = means_.rows();
  Eigen::Index comp = 0;
  if (k > 1) {
    const double top = sample_log_weights_.maxCoeff();
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) total += std::exp(sample_log_weights_[i] - top);
    double u = stream.uniform() * total;
    comp = k - 1;
    for (Eigen::Index i = 0; i < k; ++i) {
      u -= std::exp(sample_log_weights_[i] - top);
      if (u < 0.0) {
        comp = i;
        break;
      }
    }
  }
  const double sd = 1.0 / std::sqrt(m_);
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = means_(comp, static_cast<Eigen::Index>(c)) / m_ + sd * stream.normal();
  }
}

// ---------------------------------------------------------------------------
// Target

std::size_t Target::dim() const {
  return std::visit([](const auto& t) { return t.dim(); }, model_);
}

double Target::m() const {
  return std::visit([](const auto& t) { return t.m(); }, model_);
}

double Target::f(std::span<const double> w) const {
  return std::visit([&](const auto& t) { return t.f(w); }, model_);
}

double Target::U(std::span<const double> w) const {
  double s = 0.0;
  for (double x : w) s += x * x;
  return f(w) + 0.5 * m() * s;
}

void Target::grad_f(std::span<const double> w, std::span<double> out) const {
  std::visit([&](const auto& t) { t.grad_f(w, out); }, model_);
}

void Target::grad_U(std::span<const double> w, std::span<double> out) const {
  grad_f(w, out);
  const double m_coef = m();
  for (std::size_t i = 0; i < w.size(); ++i) out[i] += m_coef * w[i];
}

void Target::check_point(const Vector& w) const {
  if (static_cast<std::size_t>(w.size()) != dim()) {
    throw std::invalid_argument("dimension mismatch: point has " + std::to_string(w.size()) +
                                " coordinates, target has " + std::to_string(dim()));
  }
  if (!all_finite(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())))) {
    throw std::invalid_argument("non-finite point");
  }
}

Vector Target::grad_f(const Vector& w) const {
  check_point(w);
  Vector out(w.size());
  grad_f(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
         std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Vector Target::grad_U(const Vector& w) const {
  check_point(w);
  Vector out(w.size());
  grad_U(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
         std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Matrix Target::hessian_f(const Vector& w) const {
  check_point(w);
  const std::span<const double> ws(w.data(), static_cast<std::size_t>(w.size()));
  return std::visit([&](const auto& t) { return t.hessian_f(ws); }, model_);
}

TargetConstants Target::constants() const {
  return std::visit([](const auto& t) { return t.constants(); }, model_);
}

void Target::sample(RandomStream& stream, std::span<double> out) const {
  std::visit([&](const auto& t) { t.sample(stream, out); }, model_);
}

std::vector<std::size_t> Target::gaussian_block() const {
  return std::visit(
      overloaded{[](const QuadraticTarget& t) {
                   std::vector<std::size_t> idx(t.dim());
                   for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                   return idx;
                 },
                 [](const GaussianMixtureTarget& t) {
                   std::vector<std::size_t> idx;
                   const Matrix& mu = t.means();
                   for (Eigen::Index c = 0; c < mu.cols(); ++c) {
                     if ((mu.col(c).array() == 0.0).all()) idx.push_back(static_cast<std::size_t>(c));
                   }
                   return idx;
                 }},
      model_);
}

double Target::gaussian_block_lambda() const {
  if (const auto* q = quadratic()) return q->lambda();
  return 0.0;
}

double Target::gaussian_block_variance() const {
  return 1.0 / (m() + gaussian_block_lambda());
}

}  // namespace lapd
