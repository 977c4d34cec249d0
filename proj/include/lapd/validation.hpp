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

#ifndef LAPD_VALIDATION_HPP
#define LAPD_VALIDATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lapd/targets.hpp"

namespace lapd::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Prints "PASS|FAIL name: detail" lines; returns true iff all passed.
bool report(std::ostream& out, const std::vector<CheckResult>& results);

/// Central-difference gradient of f with step h.
Vector fd_gradient(const Target& target, const Vector& w, double h = 1e-5);
/// Central-difference Jacobian of grad_f with step h.
Matrix fd_hessian(const Target& target, const Vector& w, double h = 1e-5);

/// K x d means with entries uniform in [-scale, scale].
Matrix random_means(std::size_t k, std::size_t d, double scale, std::uint64_t seed);

// targets ---------------------------------------------------------------

/// max over points of |grad_f - FD| / (1 + |FD|), points uniform in [-box, box]^d.
CheckResult check_gradient_fd(const Target& target, int n_points, double box, std::uint64_t seed,
                              double tol = 1e-6);
/// max over points of |hessian_f - FD(grad_f)|_F / (1 + |FD|_F).
CheckResult check_hessian_fd(const Target& target, int n_points, double box, std::uint64_t seed,
                             double tol = 1e-5);
/// Eigenvalues of -∇²f within [-1e-10, λ_max(H^{1/2}) + 1e-10].
CheckResult check_hessian_sandwich(const GaussianMixtureTarget& target, int n_points, double box,
                                   std::uint64_t seed);
/// Tr(H) <= Tr(H^{1/2})² <= 16 K⁴ R_μ⁴ over random mean configurations.
CheckResult check_trace_bound(int n_configs, std::uint64_t seed);
/// Tr(H) reported by h_half equals |H^{1/2}|_F².
CheckResult check_trace_identity(const GaussianMixtureTarget& target);
/// grad_f finite for |w| up to 1e3 with |μ_i| <= 5.
CheckResult check_lse_stability(std::uint64_t seed);

// kernel ----------------------------------------------------------------

/// stage2(stage1(w0)) with noise ξ equals kernel_sample with the same ξ.
CheckResult check_composition_identity(int n_pairs, std::uint64_t seed);
/// 1-D Gauss-Legendre integral of the transition density equals 1.
CheckResult check_density_normalization();
/// Euler-Maruyama mean error slope over h = η/2 .. η/64 and terminal
/// variance at η/64.
std::vector<CheckResult> check_em_weak_order(std::size_t n_paths, std::uint64_t seed);

// schedules -------------------------------------------------------------

/// |m η̃_k / (e^{m η_{k+1}} - 1) - 1| < 1e-12 along fixed and varying schedules.
CheckResult check_coupling_identity(std::int64_t n_steps);
/// Varying schedule is non-increasing from K₀ on and bounded by η̂.
CheckResult check_varying_monotone(std::int64_t n_steps);
/// Reference values of η̂, η_{k+1} and K₀.
CheckResult check_schedule_values();

// oracle ----------------------------------------------------------------

/// Quadratic target (λ=1, m=1, d=4), fixed schedule: empirical mean/variance
/// within 5 SE of the analytic recursion at every `every`-th step.
CheckResult check_oracle_agreement(std::size_t n_chains, std::int64_t n_steps, std::int64_t every,
                                   std::uint64_t seed);
/// Exact-chain KL below the fixed-step bound for k <= 10/(α* η), three configurations.
CheckResult check_fixed_bound_validity();
/// Pure-prior coordinates of the ±e₁ mixture keep variance 1/m under LAPD.
CheckResult check_lapd_prior_stationarity(std::size_t n_chains, std::size_t dim,
                                          std::int64_t n_steps, std::uint64_t seed);
/// ULA stationary variance along pure-prior coordinates is 1/(m(1 - ηm/2)) within 2%.
CheckResult check_ula_prior_bias(std::size_t n_chains, std::size_t dim, double eta,
                                 std::int64_t n_steps, std::uint64_t seed);
/// Analytic Gaussian-block KL across dimensions: ULA linear in d - 1
/// (R² > 0.99), LAPD below 1e-12.
CheckResult check_block_kl_scaling(const std::vector<std::size_t>& dims, double ula_eta,
                                   std::int64_t n_steps);

/// Runs a named suite (kernel, gradients, schedules, oracle). Throws
/// ConfigError for an unknown name.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace lapd::validation

#endif  // LAPD_VALIDATION_HPP
