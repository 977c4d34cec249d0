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

#ifndef LAPD_SCHEDULE_HPP
#define LAPD_SCHEDULE_HPP

#include <cstdint>

#include "lapd/targets.hpp"

namespace lapd {

/// Base step for the fixed schedule: the minimum of
///   (8m)^-1, (8 Tr H^{1/2})^-1, (1.5 α*)^-1, α*/(8√2 L²), α* ε/(64 Tr H).
/// Terms whose denominator is zero (Tr H^{1/2}, Tr H or L vanishing) are dropped.
double eta_hat_fixed(const TargetConstants& c, double epsilon);

/// Same minimum without the accuracy term; base step of the varying schedule.
double eta_hat_varying(const TargetConstants& c);

/// η̃ = (e^{mη} - 1)/m, the gradient-step size coupled to diffusion time η.
double coupled_eta_tilde(double eta, double m);

/// Smallest non-negative integer K₀ ≥ (9/(8 η̂ α*)) ln(KL₀ α* / (123 η̂ Tr H)).
/// Throws InvariantViolation when Tr(H) = 0.
std::int64_t k0_burn_in(double kl0, const TargetConstants& c, double eta_hat);

enum class ScheduleKind { Fixed, Varying };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Fixed;
  double eta_hat = 0.0;
  double eta = 0.0;      // step actually used by the fixed schedule, in (0, eta_hat]
  double epsilon = 0.0;  // fixed only
  std::int64_t k0 = 0;   // varying only
  TargetConstants constants;

  /// η_{k+1}: diffusion time of the step that produces iterate k + 1.
  double step_size(std::int64_t k) const;

  static ScheduleSpec fixed(const TargetConstants& c, double epsilon);
  static ScheduleSpec fixed_with_eta(const TargetConstants& c, double epsilon, double eta);
  static ScheduleSpec varying(const TargetConstants& c, double kl0);
};

/// η_{k+1} = 8η̂ / (9 + 3 (k - K₀)₊ η̂ α*).
double eta_varying(std::int64_t k, const ScheduleSpec& spec);

}  // namespace lapd

#endif  // LAPD_SCHEDULE_HPP
