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

#include "lapd/validation.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "lapd/errors.hpp"
#include "lapd/kernel.hpp"
#include "lapd/metrics.hpp"
#include "lapd/random.hpp"
#include "lapd/sampler.hpp"
#include "lapd/schedule.hpp"

namespace lapd::validation {

namespace {

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Vector uniform_point(RandomStream& rng, std::size_t d, double box) {
  Vector w(static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < w.size(); ++c) w[c] = box * (2.0 * rng.uniform() - 1.0);
  return w;
}

Matrix symmetric_pair_means(std::size_t dim) {
  Matrix means = Matrix::Zero(2, static_cast<Eigen::Index>(dim));
  means(0, 0) = 1.0;
  means(1, 0) = -1.0;
  return means;
}

}  // namespace

bool report(std::ostream& out, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all;
}

Vector fd_gradient(const Target& target, const Vector& w, double h) {
  Vector g(w.size());
  Vector wp = w;
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    wp[c] = w[c] + h;
    const double fp = target.f({wp.data(), static_cast<std::size_t>(wp.size())});
    wp[c] = w[c] - h;
    const double fm = target.f({wp.data(), static_cast<std::size_t>(wp.size())});
    wp[c] = w[c];
    g[c] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix fd_hessian(const Target& target, const Vector& w, double h) {
  Matrix hess(w.size(), w.size());
  Vector wp = w;
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    wp[c] = w[c] + h;
    const Vector gp = target.grad_f(wp);
    wp[c] = w[c] - h;
    const Vector gm = target.grad_f(wp);
    wp[c] = w[c];
    hess.col(c) = (gp - gm) / (2.0 * h);
  }
  return hess;
}

Matrix random_means(std::size_t k, std::size_t d, double scale, std::uint64_t seed) {
  RandomStream rng(seed, kAuxStreamBase + 17);
  Matrix means(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < means.rows(); ++i) {
    for (Eigen::Index j = 0; j < means.cols(); ++j) means(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  }
  return means;
}

CheckResult check_gradient_fd(const Target& target, int n_points, double box, std::uint64_t seed,
                              double tol) {
  RandomStream rng(seed, kAuxStreamBase + 1);
  double worst = 0.0;
  for (int p = 0; p < n_points; ++p) {
    const Vector w = uniform_point(rng, target.dim(), box);
    const Vector fd = fd_gradient(target, w);
    worst = std::max(worst, (target.grad_f(w) - fd).norm() / (1.0 + fd.norm()));
  }
  return {"gradient matches finite differences", worst < tol,
          fmt("max rel err %.3e over %d points (tol %.0e)", worst, n_points, tol)};
}

CheckResult check_hessian_fd(const Target& target, int n_points, double box, std::uint64_t seed,
                             double tol) {
  RandomStream rng(seed, kAuxStreamBase + 2);
  double worst = 0.0;
  double asym = 0.0;
  for (int p = 0; p < n_points; ++p) {
    const Vector w = uniform_point(rng, target.dim(), box);
    const Matrix fd = fd_hessian(target, w);
    const Matrix h = target.hessian_f(w);
    worst = std::max(worst, (h - fd).norm() / (1.0 + fd.norm()));
    asym = std::max(asym, (h - h.transpose()).cwiseAbs().maxCoeff());
  }
  const bool ok = worst < tol && asym <= 1e-12;
  return {"hessian matches finite differences of the gradient", ok,
          fmt("max rel err %.3e, max asymmetry %.1e over %d points (tol %.0e)", worst, asym,
              n_points, tol)};
}

CheckResult check_hessian_sandwich(const GaussianMixtureTarget& mixture, int n_points, double box,
                                   std::uint64_t seed) {
  const Target target(mixture);
  RandomStream rng(seed, kAuxStreamBase + 3);
  Eigen::SelfAdjointEigenSolver<Matrix> bound_solver(mixture.h_half().matrix,
                                                     Eigen::EigenvaluesOnly);
  const double upper = bound_solver.eigenvalues().maxCoeff();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_points; ++p) {
    const Vector w = uniform_point(rng, target.dim(), box);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(-target.hessian_f(w), Eigen::EigenvaluesOnly);
    lo = std::min(lo, solver.eigenvalues().minCoeff());
    hi = std::max(hi, solver.eigenvalues().maxCoeff());
  }
  const bool ok = lo >= -1e-10 && hi <= upper + 1e-10;
  return {"hessian sandwich 0 <= -hess f <= H^1/2", ok,
          fmt("eig(-hess f) in [%.3e, %.6g], lambda_max(H^1/2) = %.6g", lo, hi, upper)};
}

CheckResult check_trace_bound(int n_configs, std::uint64_t seed) {
  RandomStream rng(seed, kAuxStreamBase + 4);
  double worst_ratio = 0.0;
  bool ok = true;
  for (int cfg = 0; cfg < n_configs; ++cfg) {
    const auto k = static_cast<std::size_t>(1 + rng.uniform() * 4.0);
    const auto d = static_cast<std::size_t>(1 + rng.uniform() * 8.0);
    const GaussianMixtureTarget t(random_means(k, d, 3.0, seed + static_cast<std::uint64_t>(cfg)));
    const HHalf& hh = t.h_half();
    const double kk = static_cast<double>(k);
    const double cap = 16.0 * kk * kk * kk * kk * std::pow(t.r_mu(), 4);
    const double sq = hh.trace * hh.trace;
    ok = ok && hh.trace_sq <= sq * (1.0 + 1e-12) && sq <= cap * (1.0 + 1e-12);
    if (cap > 0.0) worst_ratio = std::max(worst_ratio, sq / cap);
  }
  return {"Tr(H) <= Tr(H^1/2)^2 <= 16 K^4 R^4", ok,
          fmt("%d configurations, max Tr(H^1/2)^2 / 16K^4R^4 = %.3g", n_configs, worst_ratio)};
}

CheckResult check_trace_identity(const GaussianMixtureTarget& target) {
  const HHalf& hh = target.h_half();
  const double frob = hh.matrix.squaredNorm();
  const double err = std::abs(hh.trace_sq - frob);
  return {"Tr(H) equals |H^1/2|_F^2", err <= 1e-10 * std::max(1.0, frob),
          fmt("Tr(H) = %.17g, |H^1/2|_F^2 = %.17g", hh.trace_sq, frob)};
}

CheckResult check_lse_stability(std::uint64_t seed) {
  RandomStream rng(seed, kAuxStreamBase + 5);
  bool ok = true;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 8.0);
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
    Matrix means = random_means(k, d, 5.0, seed + 1000 + static_cast<std::uint64_t>(trial));
    for (Eigen::Index i = 0; i < means.rows(); ++i) {
      if (means.row(i).norm() > 5.0) means.row(i) *= 5.0 / means.row(i).norm();
    }
    const Target target{GaussianMixtureTarget(means)};
    for (double radius : {1.0, 10.0, 100.0, 1000.0}) {
      Vector w = uniform_point(rng, d, 1.0);
      if (w.norm() == 0.0) w[0] = 1.0;
      w *= radius / w.norm();
      ok = ok && target.grad_f(w).allFinite();
      ++checked;
    }
  }
  return {"log-sum-exp gradient stays finite for |w| <= 1e3", ok,
          fmt("%d points, |mu_i| <= 5", checked)};
}

CheckResult check_composition_identity(int n_pairs, std::uint64_t seed) {
  const Target target{GaussianMixtureTarget(random_means(3, 3, 2.0, seed))};
  RandomStream rng(seed, kAuxStreamBase + 6);
  double worst = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    const Vector w0 = uniform_point(rng, 3, 4.0);
    const double eta = 0.001 + 0.5 * rng.uniform();
    const TransitionKernel kernel(target, eta);

    ChainState state;
    state.positions = w0.transpose();
    state.streams.emplace_back(seed, static_cast<std::uint64_t>(p));
    lapd_stage1(state, target, kernel.eta_tilde());
    lapd_stage2_exact(state, target.m(), eta);

    RandomStream same_noise(seed, static_cast<std::uint64_t>(p));
    const Vector direct = kernel_sample(kernel, w0, same_noise);
    worst = std::max(worst, (state.positions.row(0).transpose() - direct).cwiseAbs().maxCoeff());
  }
  return {"stage2(stage1(w0)) == kernel_sample", worst <= 1e-12,
          fmt("max abs diff %.3e over %d (w0, xi) pairs", worst, n_pairs)};
}

CheckResult check_density_normalization() {
  Matrix mu(1, 1);
  mu(0, 0) = 1.5;
  const Target target{GaussianMixtureTarget(mu)};
  double worst = 0.0;
  for (double eta : {0.01, 0.3, std::log(2.0), 2.0}) {
    const TransitionKernel kernel(target, eta);
    const Vector w0 = Vector::Constant(1, 0.7);
    const double centre = kernel.mean_map(w0)[0];
    const double half_width = 10.0 * std::sqrt(kernel.var_scalar());
    constexpr int kPanels = 40;
    const double panel = 2.0 * half_width / kPanels;
    double total = 0.0;
    for (int j = 0; j < kPanels; ++j) {
      const double a = centre - half_width + j * panel;
      total += boost::math::quadrature::gauss<double, 30>::integrate(
          [&](double x) {
            return std::exp(transition_log_density(kernel, Vector::Constant(1, x), w0));
          },
          a, a + panel);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {"1-D transition density integrates to 1", worst < 1e-8,
          fmt("max |integral - 1| = %.3e", worst)};
}

std::vector<CheckResult> check_em_weak_order(std::size_t n_paths, std::uint64_t seed) {
  // Constant ∇f = 2 (single mixture component at -2); a large w0 makes the
  // O(h) bias of the EM mean dominate the Monte Carlo error.
  Matrix mu(1, 1);
  mu(0, 0) = -2.0;
  const Target target{GaussianMixtureTarget(mu)};
  const double eta = 0.25;
  const TransitionKernel kernel(target, eta);
  const Vector w0 = Vector::Constant(1, 50.0);
  const InterpolatingSde sde = InterpolatingSde::from_kernel(kernel, w0);
  const double exact_mean = kernel_mean(kernel, w0, eta)[0];

  std::vector<double> log_h;
  std::vector<double> log_err;
  std::ostringstream ladder;
  double var_finest = 0.0;
  double var_se = 0.0;
  for (int level = 1; level <= 6; ++level) {
    const double h = eta / std::ldexp(1.0, level);
    const Positions terminal = em_simulate(sde, w0, h, n_paths, seed + static_cast<std::uint64_t>(level));
    const double mean = terminal.col(0).mean();
    const double err = std::abs(mean - exact_mean);
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(err));
    ladder << fmt(" h=eta/%d:%.3e", 1 << level, err);
    if (level == 6) {
      var_finest = (terminal.col(0).array() - mean).square().sum() / static_cast<double>(n_paths - 1);
      var_se = kernel.var_scalar() * std::sqrt(2.0 / static_cast<double>(n_paths - 1));
    }
  }
  const double n = static_cast<double>(log_h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sx += log_h[i];
    sy += log_err[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double var_z = std::abs(var_finest - kernel.var_scalar()) / var_se;
  return {
      {"EM weak order of the interpolating SDE", std::abs(slope - 1.0) <= 0.3,
       fmt("log-log slope %.3f (want 1.0 +- 0.3);", slope) + ladder.str()},
      {"EM terminal variance matches the kernel", var_z <= 5.0,
       fmt("var %.6f vs %.6f at h = eta/64 (%.2f SE)", var_finest, kernel.var_scalar(), var_z)}};
}

CheckResult check_coupling_identity(std::int64_t n_steps) {
  const GaussianMixtureTarget mixture(symmetric_pair_means(3), 0.5);
  const TargetConstants c = mixture.constants();
  double worst = 0.0;
  for (const ScheduleSpec& spec : {ScheduleSpec::fixed(c, 0.1), ScheduleSpec::varying(c, 50.0)}) {
    for (std::int64_t k = 0; k < n_steps; ++k) {
      const double eta = spec.step_size(k);
      const double eta_tilde = coupled_eta_tilde(eta, c.m);
      worst = std::max(worst, std::abs(c.m * eta_tilde / std::expm1(c.m * eta) - 1.0));
    }
  }
  for (double m : {1e-12, 1e-6, 0.5, 1.0, 7.0}) {
    for (double eta : {1e-9, 1e-4, 0.1, 1.0}) {
      worst = std::max(worst, std::abs(m * coupled_eta_tilde(eta, m) / std::expm1(m * eta) - 1.0));
    }
  }
  return {"step coupling m eta~ / (e^{m eta} - 1) = 1", worst < 1e-12,
          fmt("max deviation %.3e", worst)};
}

CheckResult check_varying_monotone(std::int64_t n_steps) {
  const GaussianMixtureTarget mixture(symmetric_pair_means(2), 0.5);
  const ScheduleSpec spec = ScheduleSpec::varying(mixture.constants(), 1e4);
  bool ok = true;
  double prev = spec.step_size(0);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double eta = spec.step_size(k);
    ok = ok && eta > 0.0 && eta <= spec.eta_hat;
    if (k > spec.k0) ok = ok && eta <= prev;
    prev = eta;
  }
  return {"varying schedule non-increasing and <= eta_hat", ok,
          fmt("K0 = %lld, eta_1 = %.6g, eta_%lld = %.6g, eta_hat = %.6g",
              static_cast<long long>(spec.k0), spec.step_size(0), static_cast<long long>(n_steps),
              spec.step_size(n_steps - 1), spec.eta_hat)};
}

CheckResult check_schedule_values() {
  const TargetConstants c{.m = 1.0, .L = 1.0, .tr_h = 1.0, .tr_h_sqrt = 1.0, .alpha_star = 0.5};
  const double fixed = eta_hat_fixed(c, 0.1);
  ScheduleSpec spec{.kind = ScheduleKind::Varying, .eta_hat = 0.04, .k0 = 10, .constants = c};
  const double v10 = eta_varying(10, spec);
  const double v20 = eta_varying(20, spec);
  const std::int64_t k0 = k0_burn_in(10.0, c, 0.04);
  const bool ok = std::abs(fixed - 0.00078125) < 1e-15 && std::abs(v10 - 0.32 / 9.0) < 1e-15 &&
                  std::abs(v20 - 0.32 / 9.6) < 1e-15 && k0 == 1;
  return {"schedule reference values", ok,
          fmt("eta_hat_fixed = %.8g, eta_varying(10) = %.7g, eta_varying(20) = %.7g, K0 = %lld",
              fixed, v10, v20, static_cast<long long>(k0))};
}

CheckResult check_oracle_agreement(std::size_t n_chains, std::int64_t n_steps, std::int64_t every,
                                   std::uint64_t seed) {
  const Target target{QuadraticTarget(1.0, 4, 1.0)};
  const ScheduleSpec schedule = ScheduleSpec::fixed(target.constants(), 1.0);
  const Vector init_mean = Vector::Ones(4);
  ChainState state = make_chain_state(n_chains, init_mean, 1.0, seed);
  GaussianMoments oracle = GaussianMoments::isotropic(init_mean, 1.0);
  const std::vector<std::size_t> coords{0, 1, 2, 3};
  const double n = static_cast<double>(n_chains);
  double worst_z = 0.0;
  int checkpoints = 0;
  auto compare = [&](const ChainState& s) {
    const GaussianMoments emp = empirical_moments(s.positions, coords);
    for (Eigen::Index c = 0; c < 4; ++c) {
      const double mean_se = std::sqrt(oracle.var[c] / n);
      const double var_se = oracle.var[c] * std::sqrt(2.0 / (n - 1.0));
      worst_z = std::max(worst_z, std::abs(emp.mean[c] - oracle.mean[c]) / mean_se);
      worst_z = std::max(worst_z, std::abs(emp.var[c] - oracle.var[c]) / var_se);
    }
    ++checkpoints;
  };
  compare(state);
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    const StepInfo info = lapd_step(state, target, schedule);
    oracle = gaussian_chain_advance(oracle, 1.0, 1.0, info.eta, info.eta_tilde);
    if (k % every == 0) compare(state);
  }
  return {"ensemble moments match the exact Gaussian recursion", worst_z <= 5.0,
          fmt("max |z| = %.2f over %d checkpoints x 4 coords x {mean, var}, %zu chains, eta = %.6g",
              worst_z, checkpoints, n_chains, schedule.eta)};
}

CheckResult check_fixed_bound_validity() {
  struct Case {
    double lambda;
    double epsilon;
  };
  const Case cases[] = {{1.0, 0.5}, {0.25, 0.1}, {4.0, 2.0}};
  const std::size_t d = 4;
  const double m = 1.0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::int64_t total_k = 0;
  bool ok = true;
  std::ostringstream detail;
  for (const Case& cs : cases) {
    const QuadraticTarget q(cs.lambda, d, m);
    const TargetConstants c = q.constants();  // α* = m + λ
    const ScheduleSpec schedule = ScheduleSpec::fixed(c, cs.epsilon);
    const GaussianMoments target = GaussianMoments::isotropic(Vector::Zero(d), 1.0 / (m + cs.lambda));
    GaussianMoments chain = GaussianMoments::isotropic(Vector::Ones(d), 1.0);
    const double kl0 = gaussian_kl(chain, target);
    const auto k_max = static_cast<std::int64_t>(std::floor(10.0 / (c.alpha_star * schedule.eta)));
    double case_min = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= k_max; ++k) {
      const double measured = gaussian_kl(chain, target);
      const BoundEvaluation ev{k, theorem_fixed_bound(k, kl0, schedule.eta, c), measured,
                               theorem_fixed_bound(k, kl0, schedule.eta, c) - measured};
      case_min = std::min(case_min, ev.slack);
      ok = ok && ev.slack >= 0.0;
      const double eta = schedule.step_size(k);
      chain = gaussian_chain_advance(chain, cs.lambda, m, eta, coupled_eta_tilde(eta, m));
    }
    total_k += k_max + 1;
    min_slack = std::min(min_slack, case_min);
    detail << fmt(" [lambda=%g alpha*=%g eps=%g eta=%.4g k<=%lld min slack %.3e]", cs.lambda,
                  c.alpha_star, cs.epsilon, schedule.eta, static_cast<long long>(k_max), case_min);
  }
  return {"exact KL stays below the fixed-step bound", ok,
          fmt("%lld iterates, min slack %.3e;", static_cast<long long>(total_k), min_slack) +
              detail.str()};
}

namespace {

// Pooled per-coordinate variance over the pure-prior block of a state.
struct PooledVariance {
  double var;
  double n_samples;
};

PooledVariance pooled_block_variance(const ChainState& state, const std::vector<std::size_t>& block) {
  const GaussianMoments emp = empirical_moments(state.positions, block);
  return {emp.var.mean(), static_cast<double>(state.n_chains() * block.size())};
}

}  // namespace

CheckResult check_lapd_prior_stationarity(std::size_t n_chains, std::size_t dim,
                                          std::int64_t n_steps, std::uint64_t seed) {
  const Target target{GaussianMixtureTarget(symmetric_pair_means(dim), 0.1)};
  const ScheduleSpec schedule = ScheduleSpec::varying(target.constants(), 0.2);
  ChainState state = make_chain_state(n_chains, Vector::Zero(static_cast<Eigen::Index>(dim)), 1.0, seed);
  run_chain(state, target, schedule, {.sampler = SamplerKind::Lapd, .n_steps = n_steps});
  const auto block = target.gaussian_block();
  const PooledVariance pv = pooled_block_variance(state, block);
  const GaussianMoments emp = empirical_moments(state.positions, block);
  const double var_se = std::sqrt(2.0 / pv.n_samples);
  const double mean_se = std::sqrt(1.0 / pv.n_samples);
  const double var_z = std::abs(pv.var - 1.0) / var_se;
  const double mean_z = std::abs(emp.mean.mean()) / mean_se;
  return {"LAPD keeps pure-prior coordinates at N(0, 1/m)", var_z <= 5.0 && mean_z <= 5.0,
          fmt("pooled var %.6f (%.2f SE), pooled mean %.2e (%.2f SE), %.0f samples after %lld steps",
              pv.var, var_z, emp.mean.mean(), mean_z, pv.n_samples, static_cast<long long>(n_steps))};
}

CheckResult check_ula_prior_bias(std::size_t n_chains, std::size_t dim, double eta,
                                 std::int64_t n_steps, std::uint64_t seed) {
  const Target target{GaussianMixtureTarget(symmetric_pair_means(dim), 0.1)};
  TargetConstants c = target.constants();
  const ScheduleSpec schedule = ScheduleSpec::fixed_with_eta(c, 0.1, eta);
  ChainState state = make_chain_state(n_chains, Vector::Zero(static_cast<Eigen::Index>(dim)), 1.0, seed);
  run_chain(state, target, schedule, {.sampler = SamplerKind::Ula, .n_steps = n_steps});
  const PooledVariance pv = pooled_block_variance(state, target.gaussian_block());
  const double expected = 1.0 / (c.m * (1.0 - eta * c.m / 2.0));
  const double rel = std::abs(pv.var / expected - 1.0);
  return {"ULA pure-prior variance is biased to 1/(m(1 - eta m/2))", rel <= 0.02,
          fmt("pooled var %.6f vs %.6f (rel dev %.2e, tol 2%%), %.0f samples, eta = %g", pv.var,
              expected, rel, pv.n_samples, eta)};
}

CheckResult check_block_kl_scaling(const std::vector<std::size_t>& dims, double ula_eta,
                                   std::int64_t n_steps) {
  std::vector<double> xs;
  std::vector<double> ula_kl;
  double lapd_max = 0.0;
  std::ostringstream detail;
  for (std::size_t d : dims) {
    const Target target{GaussianMixtureTarget(symmetric_pair_means(d), 0.1)};
    const double m = target.m();
    const auto block = target.gaussian_block();
    const auto nb = static_cast<Eigen::Index>(block.size());
    const GaussianMoments goal = GaussianMoments::isotropic(Vector::Zero(nb), 1.0 / m);
    const ScheduleSpec lapd_schedule = ScheduleSpec::varying(target.constants(), 0.2);
    GaussianMoments lapd = GaussianMoments::isotropic(Vector::Zero(nb), 1.0);
    GaussianMoments ula = lapd;
    for (std::int64_t k = 0; k < n_steps; ++k) {
      const double eta = lapd_schedule.step_size(k);
      lapd = gaussian_chain_advance(lapd, 0.0, m, eta, coupled_eta_tilde(eta, m));
      ula = ula_gaussian_advance(ula, 0.0, m, ula_eta);
    }
    const double lapd_kl = nb > 0 ? gaussian_kl(lapd, goal) : 0.0;
    const double u_kl = nb > 0 ? gaussian_kl(ula, goal) : 0.0;
    lapd_max = std::max(lapd_max, lapd_kl);
    xs.push_back(static_cast<double>(d - 1));
    ula_kl.push_back(u_kl);
    detail << fmt(" d=%zu: ULA %.4e LAPD %.1e;", d, u_kl, lapd_kl);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ula_kl[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ula_kl[i] - my);
    syy += (ula_kl[i] - my) * (ula_kl[i] - my);
  }
  const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
  const bool ok = r2 > 0.99 && sxy > 0.0 && lapd_max < 1e-12;
  return {"Gaussian-block KL: ULA linear in d-1, LAPD zero", ok,
          fmt("R^2 = %.6f, max LAPD KL = %.2e;", r2, lapd_max) + detail.str()};
}

std::vector<CheckResult> run_suite(const std::string& name) {
  constexpr std::uint64_t kSeed = 20240601;
  std::vector<CheckResult> out;
  if (name == "kernel") {
    out.push_back(check_composition_identity(1000, kSeed));
    out.push_back(check_density_normalization());
    for (auto& r : check_em_weak_order(1000000, kSeed)) out.push_back(std::move(r));
  } else if (name == "gradients") {
    const GaussianMixtureTarget mixture(random_means(3, 4, 2.0, kSeed));
    const Target target{mixture};
    out.push_back(check_gradient_fd(target, 100, 3.0, kSeed));
    out.push_back(check_hessian_fd(target, 100, 3.0, kSeed));
    out.push_back(check_hessian_sandwich(mixture, 100, 3.0, kSeed));
    out.push_back(check_trace_identity(mixture));
    out.push_back(check_trace_bound(20, kSeed));
    out.push_back(check_lse_stability(kSeed));
    auto quad = check_gradient_fd(Target{QuadraticTarget(2.0, 5)}, 100, 3.0, kSeed);
    quad.name = "quadratic " + quad.name;
    out.push_back(std::move(quad));
  } else if (name == "schedules") {
    out.push_back(check_schedule_values());
    out.push_back(check_coupling_identity(100000));
    out.push_back(check_varying_monotone(100000));
  } else if (name == "oracle") {
    out.push_back(check_oracle_agreement(20000, 200, 10, kSeed));
    out.push_back(check_fixed_bound_validity());
    out.push_back(check_lapd_prior_stationarity(20000, 11, 50, kSeed));
    out.push_back(check_ula_prior_bias(20000, 11, 0.1, 200, kSeed));
    out.push_back(check_block_kl_scaling({2, 8, 32, 128}, 0.1, 200));
  } else {
    throw ConfigError("validate: unknown suite \"" + name +
                      "\" (expected kernel, gradients, schedules or oracle)");
  }
  return out;
}

}  // namespace lapd::validation
