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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lapd/errors.hpp"

namespace lapd {

namespace {

void require_positive_constants(const TargetConstants& c) {
  if (!(c.m > 0.0)) throw InvariantViolation("constants.m must be > 0");
  if (!(c.alpha_star > 0.0)) throw InvariantViolation("constants.alpha_star must be > 0");
  if (!(c.L >= 0.0)) throw InvariantViolation("constants.L must be >= 0");
  if (!(c.tr_h >= 0.0) || !(c.tr_h_sqrt >= 0.0)) {
    throw InvariantViolation("constants.tr_h and tr_h_sqrt must be >= 0");
  }
}

}  // namespace

double eta_hat_varying(const TargetConstants& c) {
  require_positive_constants(c);
  double eta = 1.0 / (8.0 * c.m);
  if (c.tr_h_sqrt > 0.0) eta = std::min(eta, 1.0 / (8.0 * c.tr_h_sqrt));
  eta = std::min(eta, 1.0 / (1.5 * c.alpha_star));
  if (c.L > 0.0) eta = std::min(eta, c.alpha_star / (8.0 * std::sqrt(2.0) * c.L * c.L));
  return eta;
}

double eta_hat_fixed(const TargetConstants& c, double epsilon) {
  if (!(epsilon > 0.0)) throw InvariantViolation("schedule.epsilon must be > 0");
  double eta = eta_hat_varying(c);
  if (c.tr_h > 0.0) eta = std::min(eta, c.alpha_star * epsilon / (64.0 * c.tr_h));
  return eta;
}

double coupled_eta_tilde(double eta, double m) {
  if (!(eta > 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("coupled_eta_tilde: eta and m must be > 0");
  }
  const double x = m * eta;
  if (x < 1e-8) return eta * (1.0 + 0.5 * x);
  return std::expm1(x) / m;
}

std::int64_t k0_burn_in(double kl0, const TargetConstants& c, double eta_hat) {
  if (!(c.tr_h > 0.0)) {
    throw InvariantViolation("varying schedule requires Tr(H) > 0");
  }
  if (!(kl0 >= 0.0)) throw InvariantViolation("schedule.kl0 must be >= 0");
  if (!(eta_hat > 0.0) || !(c.alpha_star > 0.0)) {
    throw InvariantViolation("k0_burn_in: eta_hat and alpha_star must be > 0");
  }
  const double arg = kl0 * c.alpha_star / (123.0 * eta_hat * c.tr_h);
  if (!(arg > 1.0)) return 0;
  const double rhs = 9.0 / (8.0 * eta_hat * c.alpha_star) * std::log(arg);
  return static_cast<std::int64_t>(std::ceil(rhs));
}

double eta_varying(std::int64_t k, const ScheduleSpec& spec) {
  const double excess = static_cast<double>(std::max<std::int64_t>(k - spec.k0, 0));
  return 8.0 * spec.eta_hat / (9.0 + 3.0 * excess * spec.eta_hat * spec.constants.alpha_star);
}

double ScheduleSpec::step_size(std::int64_t k) const {
  return kind == ScheduleKind::Fixed ? eta : eta_varying(k, *this);
}

ScheduleSpec ScheduleSpec::fixed(const TargetConstants& c, double epsilon) {
  const double eta_hat = eta_hat_fixed(c, epsilon);
  return {.kind = ScheduleKind::Fixed,
          .eta_hat = eta_hat,
          .eta = eta_hat,
          .epsilon = epsilon,
          .k0 = 0,
          .constants = c};
}

ScheduleSpec ScheduleSpec::fixed_with_eta(const TargetConstants& c, double epsilon, double eta) {
  ScheduleSpec s = fixed(c, epsilon);
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvariantViolation("schedule.eta must be > 0");
  s.eta = eta;
  return s;
}

ScheduleSpec ScheduleSpec::varying(const TargetConstants& c, double kl0) {
  const double eta_hat = eta_hat_varying(c);
  return {.kind = ScheduleKind::Varying,
          .eta_hat = eta_hat,
          .eta = 8.0 * eta_hat / 9.0,
          .epsilon = 0.0,
          .k0 = k0_burn_in(kl0, c, eta_hat),
          .constants = c};
}

}  // namespace lapd
