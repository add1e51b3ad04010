// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fairdiff/denoiser.hpp"
#include "fairdiff/rng.hpp"
#include "fairdiff/vec.hpp"

namespace fairdiff {

/// Coefficients of the forward/reverse diffusion processes over T steps.
///
/// Arrays are indexed directly by the step index t in [1, T]; slot 0 holds
/// the conventional values beta_0 = 0, alpha_0 = 1, alpha_bar_0 = 1,
/// sigma_0 = 0 and is never a valid reverse step.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> betas;       // size T+1
    std::vector<double> alphas;      // alpha_t = 1 - beta_t
    std::vector<double> alpha_bars;  // alpha_bar_t = prod_{s<=t} alpha_s
    std::vector<double> sigmas;      // reverse-step std dev, sigma_t = sqrt(beta_t)
};

/// One full denoising chain under a fixed policy.
///
/// states[0] = x_T down to states[T] = x_0; transition k (0-based) goes from
/// step index t = T-k to t-1, with means[k] and log_probs[k] recorded for it.
struct Trajectory {
    std::vector<Vec> states;     // T+1 points
    std::vector<Vec> means;      // T policy means
    std::vector<double> log_probs;  // T Gaussian log-densities
    std::uint64_t rng_seed = 0;

    const Vec& terminal() const { return states.back(); }
    int step_count() const { return static_cast<int>(means.size()); }
    /// Step index t of transition k, i.e. the sigma/beta row it used.
    int step_index(int k) const { return step_count() - k; }
};

/// Linear beta ramp from beta_min to beta_max over t = 1..T.
/// Throws ConfigError for T < 2 or betas outside (0,1).
NoiseSchedule make_schedule(int T, double beta_min, double beta_max);

/// Closed-form forward noising: sqrt(abar_t) x0 + sqrt(1-abar_t) noise.
Vec forward_diffuse(const Vec& x0, int t, const Vec& noise, const NoiseSchedule& schedule);

/// Policy mean mu_theta(x_t, t) = (x_t - beta_t/sqrt(1-abar_t) eps_theta) / sqrt(alpha_t).
Vec reverse_mean(const DenoiserParams& params, const Vec& x_t, int t,
                 const NoiseSchedule& schedule);

/// Log-density of an isotropic Gaussian N(mean, sigma^2 I) at x.
double gaussian_log_prob(const Vec& x, const Vec& mean, double sigma);

/// Roll out one denoising chain: x_T ~ N(0, I), then T stochastic reverse
/// steps with per-step means and log-probabilities recorded.
Trajectory sample_trajectory(const DenoiserParams& params, const NoiseSchedule& schedule,
                             Rng& rng);

/// Exact KL(N(mean_new, s^2 I) || N(mean_old, s^2 I)) = ||new-old||^2 / (2 s^2).
double step_kl(const Vec& mean_new, const Vec& mean_old, double sigma);

}  // namespace fairdiff
