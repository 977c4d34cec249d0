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

#include "lapd/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lapd/errors.hpp"

namespace lapd {
namespace {

const TargetConstants kUnit{.m = 1.0, .L = 1.0, .tr_h = 1.0, .tr_h_sqrt = 1.0, .alpha_star = 0.5};

TEST(EtaHatFixed, SmallestTermWins) {
  // Terms: 1/8, 1/8, 1/0.75, 0.5/(8 sqrt 2), 0.5 * 0.1 / 64.
  EXPECT_DOUBLE_EQ(eta_hat_fixed(kUnit, 0.1), 0.00078125);
  EXPECT_DOUBLE_EQ(eta_hat_fixed(kUnit, 100.0), 0.5 / (8.0 * std::sqrt(2.0)));
}

TEST(EtaHatFixed, DegenerateTracesDropTheirTerms) {
  const TargetConstants c{.m = 2.0, .L = 0.5, .tr_h = 0.0, .tr_h_sqrt = 0.0, .alpha_star = 0.05};
  const double expected = std::min({1.0 / 16.0, 1.0 / 0.075, 0.05 / (8.0 * std::sqrt(2.0) * 0.25)});
  EXPECT_DOUBLE_EQ(eta_hat_fixed(c, 0.1), expected);
}

TEST(EtaHatFixed, PurePriorDropsTheLipschitzTerm) {
  const TargetConstants c{.m = 1.0, .L = 0.0, .tr_h = 0.0, .tr_h_sqrt = 0.0, .alpha_star = 1.0};
  EXPECT_DOUBLE_EQ(eta_hat_fixed(c, 0.1), 0.125);
}

TEST(EtaHatVarying, IgnoresEpsilon) {
  EXPECT_DOUBLE_EQ(eta_hat_varying(kUnit), 0.5 / (8.0 * std::sqrt(2.0)));
}

TEST(EtaVarying, ReferenceValues) {
  ScheduleSpec spec{.kind = ScheduleKind::Varying, .eta_hat = 0.04, .k0 = 10, .constants = kUnit};
  EXPECT_NEAR(eta_varying(10, spec), 0.0355556, 5e-8);
  EXPECT_DOUBLE_EQ(eta_varying(10, spec), 8.0 * 0.04 / 9.0);
  EXPECT_NEAR(eta_varying(20, spec), 0.0333333, 5e-8);
  for (std::int64_t k = 0; k < 10; ++k) EXPECT_EQ(eta_varying(k, spec), eta_varying(10, spec));
}

TEST(EtaVarying, NonIncreasingAndBelowEtaHat) {
  const ScheduleSpec spec = ScheduleSpec::varying(kUnit, 1e3);
  double prev = spec.step_size(0);
  for (std::int64_t k = 0; k < 200000; ++k) {
    const double eta = spec.step_size(k);
    ASSERT_LE(eta, prev);
    ASSERT_GT(eta, 0.0);
    ASSERT_LE(eta, spec.eta_hat);
    prev = eta;
  }
}

TEST(BurnIn, Reference) {
  // (9 / (8 * 0.04 * 0.5)) * ln(10 * 0.5 / (123 * 0.04)) = 56.25 * 0.016129 = 0.907.
  EXPECT_EQ(k0_burn_in(10.0, kUnit, 0.04), 1);
  EXPECT_EQ(k0_burn_in(1e4, kUnit, 0.04),
            static_cast<std::int64_t>(std::ceil(56.25 * std::log(1e4 * 0.5 / 4.92))));
}

TEST(BurnIn, ClampsAtZero) {
  EXPECT_EQ(k0_burn_in(1.0, kUnit, 0.04), 0);
  EXPECT_EQ(k0_burn_in(0.0, kUnit, 0.04), 0);
}

TEST(BurnIn, RequiresCurvature) {
  TargetConstants c = kUnit;
  c.tr_h = 0.0;
  EXPECT_THROW(k0_burn_in(10.0, c, 0.04), InvariantViolation);
}

TEST(CoupledEtaTilde, ReferenceValues) {
  EXPECT_NEAR(coupled_eta_tilde(std::log(2.0), 1.0), 1.0, 1e-15);
  EXPECT_NEAR(coupled_eta_tilde(0.5, 2.0), 0.8591409, 5e-8);
  EXPECT_NEAR(coupled_eta_tilde(0.3, 1e-12), 0.3, 1e-9);
  EXPECT_NEAR(coupled_eta_tilde(0.3, 1e-300), 0.3, 1e-15);
}

TEST(CoupledEtaTilde, CouplingIdentityHolds) {
  for (double m : {1e-6, 0.1, 1.0, 3.0}) {
    for (double eta : {1e-7, 1e-3, 0.2, 2.0}) {
      const double eta_tilde = coupled_eta_tilde(eta, m);
      EXPECT_NEAR(m * eta_tilde / std::expm1(m * eta), 1.0, 1e-14);
      EXPECT_GE(eta_tilde, eta);
    }
  }
}

TEST(ScheduleSpec, FixedIsConstant) {
  const ScheduleSpec spec = ScheduleSpec::fixed(kUnit, 0.1);
  EXPECT_EQ(spec.eta, spec.eta_hat);
  EXPECT_EQ(spec.step_size(0), spec.step_size(12345));
}

TEST(ScheduleSpec, FixedWithEtaKeepsEtaHat) {
  const ScheduleSpec spec = ScheduleSpec::fixed_with_eta(kUnit, 0.1, 1e-4);
  EXPECT_EQ(spec.step_size(7), 1e-4);
  EXPECT_DOUBLE_EQ(spec.eta_hat, 0.00078125);
}

TEST(ScheduleSpec, VaryingStartsAtEightNinthsEtaHat) {
  const ScheduleSpec spec = ScheduleSpec::varying(kUnit, 10.0);
  EXPECT_EQ(spec.k0, k0_burn_in(10.0, kUnit, spec.eta_hat));
  EXPECT_DOUBLE_EQ(spec.step_size(0), 8.0 * spec.eta_hat / 9.0);
}

}  // namespace
}  // namespace lapd
