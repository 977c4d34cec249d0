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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lapd/metrics.hpp"

namespace lapd {
namespace {

Target single_mean_target(std::initializer_list<double> mu) {
  Matrix m(1, static_cast<Eigen::Index>(mu.size()));
  Eigen::Index j = 0;
  for (double v : mu) m(0, j++) = v;
  return Target{GaussianMixtureTarget(m)};
}

Vector vec(std::initializer_list<double> data) {
  Vector v(static_cast<Eigen::Index>(data.size()));
  Eigen::Index i = 0;
  for (double x : data) v[i++] = x;
  return v;
}

TEST(TransitionKernel, MeanMapAndVariance) {
  const Target t{QuadraticTarget(0.5, 2, 1.0)};
  const TransitionKernel k(t, 0.2);
  const Vector w0 = vec({1.0, -3.0});
  const double eta_tilde = std::expm1(0.2);
  EXPECT_DOUBLE_EQ(k.eta_tilde(), eta_tilde);
  EXPECT_TRUE(k.mean_map(w0).isApprox((1.0 - 0.5 * eta_tilde) * std::exp(-0.2) * w0, 1e-15));
  EXPECT_DOUBLE_EQ(k.var_scalar(), -std::expm1(-0.4));
}

TEST(KernelMean, StartsAtTheAnchor) {
  const Target t = single_mean_target({3.0, -1.0});
  const TransitionKernel k(t, 0.7);
  const Vector w0 = vec({0.25, 4.0});
  EXPECT_EQ(kernel_mean(k, w0, 0.0), w0);
}

TEST(KernelMean, PureOuShrinkage) {
  const Target t = single_mean_target({0.0});
  const TransitionKernel k(t, std::log(2.0));
  EXPECT_NEAR(kernel_mean(k, vec({2.0}), std::log(2.0))[0], 1.0, 1e-15);
}

TEST(KernelMean, EndsAtTheMeanMap) {
  const Target t = single_mean_target({1.5, -0.5, 2.0});
  for (double eta : {1e-6, 0.05, 0.9, 3.0}) {
    const TransitionKernel k(t, eta);
    const Vector w0 = vec({0.3, 0.3, -1.0});
    EXPECT_TRUE(kernel_mean(k, w0, eta).isApprox(k.mean_map(w0), 1e-13)) << "eta = " << eta;
  }
}

TEST(KernelMean, RejectsTimesOutsideTheStep) {
  const Target t = single_mean_target({1.0});
  const TransitionKernel k(t, 0.5);
  EXPECT_THROW(kernel_mean(k, vec({0.0}), -0.1), std::invalid_argument);
  EXPECT_THROW(kernel_mean(k, vec({0.0}), 0.6), std::invalid_argument);
}

TEST(InterpolatingSde, CoupledAnchorCoefficientIsOne) {
  const Target t = single_mean_target({1.0});
  const TransitionKernel k(t, 0.37);
  EXPECT_NEAR(InterpolatingSde::from_kernel(k, vec({0.0})).anchor_coefficient(), 1.0, 1e-15);
  const TransitionKernel uncoupled(t, 0.37, 0.2);
  EXPECT_NEAR(InterpolatingSde::from_kernel(uncoupled, vec({0.0})).anchor_coefficient(),
              0.2 / std::expm1(0.37), 1e-15);
}

TEST(TransitionDensity, ReferenceValueAtTheMean) {
  const Target t = single_mean_target({0.8});
  const TransitionKernel k(t, std::log(2.0));
  const Vector w0 = vec({-0.4});
  EXPECT_NEAR(k.var_scalar(), 0.75, 1e-15);
  // -0.5 ln(2 pi 0.75)
  EXPECT_NEAR(transition_log_density(k, k.mean_map(w0), w0), -0.7750974969787823, 1e-13);
}

TEST(TransitionDensity, MatchesIsotropicGaussian) {
  const Target t = single_mean_target({0.5, -1.0, 2.0});
  const TransitionKernel k(t, 0.3);
  const Vector w0 = vec({1.0, 0.0, -1.0});
  const Vector w = vec({0.2, 0.4, -0.1});
  const Vector mean = (w0 - k.eta_tilde() * t.grad_f(w0)) * std::exp(-0.3);
  const double var = (1.0 - std::exp(-0.6));
  double expected = 0.0;
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double z = w[c] - mean[c];
    expected += -0.5 * std::log(2.0 * std::numbers::pi * var) - z * z / (2.0 * var);
  }
  EXPECT_NEAR(transition_log_density(k, w, w0), expected, 1e-12);
  EXPECT_THROW(transition_log_density(k, vec({0.0}), w0), std::invalid_argument);
}

TEST(KernelSample, EqualsTheTwoStages) {
  const Target t = single_mean_target({1.0, 2.0});
  const TransitionKernel k(t, 0.25);
  const Vector w0 = vec({-0.5, 0.75});
  ChainState state;
  state.positions = w0.transpose();
  state.streams.emplace_back(31, 0);
  lapd_stage1(state, t, k.eta_tilde());
  lapd_stage2_exact(state, t.m(), k.eta());
  RandomStream same(31, 0);
  const Vector direct = kernel_sample(k, w0, same);
  EXPECT_LE((state.positions.row(0).transpose() - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EmSimulate, ZeroAnchorGradientReducesToOu) {
  const Target t = single_mean_target({0.0});
  const double eta = 0.25;
  const TransitionKernel k(t, eta);
  const Vector w0 = vec({0.5});
  const std::size_t n = 200000;
  const Positions em = em_simulate(InterpolatingSde::from_kernel(k, w0), w0, eta / 64, n, 3);
  ChainState exact = make_chain_state(n, w0, 0.0, 4);
  lapd_stage2_exact(exact, 1.0, eta);
  const std::vector<std::size_t> coords{0};
  const GaussianMoments a = empirical_moments(em, coords);
  const GaussianMoments b = empirical_moments(exact.positions, coords);
  const double v = k.var_scalar();
  EXPECT_LT(std::abs(a.mean[0] - b.mean[0]), 5.0 * std::sqrt(2.0 * v / n));
  EXPECT_LT(std::abs(a.var[0] - b.var[0]), 5.0 * v * std::sqrt(4.0 / n));
}

TEST(EmSimulate, RejectsNonDividingSubstep) {
  const Target t = single_mean_target({1.0});
  const TransitionKernel k(t, 0.25);
  const Vector w0 = vec({0.0});
  const InterpolatingSde sde = InterpolatingSde::from_kernel(k, w0);
  EXPECT_THROW(em_simulate(sde, w0, 0.1, 10, 1), std::invalid_argument);
  EXPECT_THROW(em_simulate(sde, w0, 0.0, 10, 1), std::invalid_argument);
  EXPECT_NO_THROW(em_simulate(sde, w0, 0.25 / 8, 10, 1));
}

TEST(EmSimulate, PathsUseTheirOwnStreams) {
  const Target t = single_mean_target({1.0});
  const TransitionKernel k(t, 0.5);
  const Vector w0 = vec({0.0});
  const InterpolatingSde sde = InterpolatingSde::from_kernel(k, w0);
  const Positions many = em_simulate(sde, w0, 0.125, 5000, 9);
  const Positions few = em_simulate(sde, w0, 0.125, 3, 9);
  EXPECT_EQ(many.topRows(3), few);
}

}  // namespace
}  // namespace lapd
