// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/diffusion.hpp"

#include <cmath>
#include <string>

#include "fairdiff/errors.hpp"

namespace fairdiff {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check_step_index(int t, const NoiseSchedule& schedule, const char* where) {
    if (t < 1 || t > schedule.T) {
        throw ConfigError(std::string(where) + ": step index " + std::to_string(t) +
                          " outside [1, " + std::to_string(schedule.T) + "]");
    }
}
}  // namespace

NoiseSchedule make_schedule(int T, double beta_min, double beta_max) {
    if (T < 2) throw ConfigError("make_schedule: T must be >= 2");
    if (!(beta_min > 0.0) || !(beta_max < 1.0) || beta_min > beta_max) {
        throw ConfigError("make_schedule: need 0 < beta_min <= beta_max < 1");
    }
    NoiseSchedule s;
    s.T = T;
    s.betas.assign(static_cast<std::size_t>(T) + 1, 0.0);
    s.alphas.assign(static_cast<std::size_t>(T) + 1, 1.0);
    s.alpha_bars.assign(static_cast<std::size_t>(T) + 1, 1.0);
    s.sigmas.assign(static_cast<std::size_t>(T) + 1, 0.0);
    for (int t = 1; t <= T; ++t) {
        const double frac = static_cast<double>(t - 1) / (T - 1);
        const std::size_t i = static_cast<std::size_t>(t);
        s.betas[i] = beta_min + (beta_max - beta_min) * frac;
        s.alphas[i] = 1.0 - s.betas[i];
        s.alpha_bars[i] = s.alpha_bars[i - 1] * s.alphas[i];
        s.sigmas[i] = std::sqrt(s.betas[i]);
    }
    return s;
}

Vec forward_diffuse(const Vec& x0, int t, const Vec& noise, const NoiseSchedule& schedule) {
    check_step_index(t, schedule, "forward_diffuse");
    check_same_dim(x0, noise, "forward_diffuse");
    const double abar = schedule.alpha_bars[static_cast<std::size_t>(t)];
    const double signal = std::sqrt(abar);
    const double spread = std::sqrt(1.0 - abar);
    Vec out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + spread * noise[i];
    return out;
}

Vec reverse_mean(const DenoiserParams& params, const Vec& x_t, int t,
                 const NoiseSchedule& schedule) {
    check_step_index(t, schedule, "reverse_mean");
    const std::size_t i = static_cast<std::size_t>(t);
    const Vec eps = forward(params, x_t, t);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alphas[i]);
    const double eps_coef = schedule.betas[i] / std::sqrt(1.0 - schedule.alpha_bars[i]);
    Vec mu(x_t.size());
    for (std::size_t j = 0; j < x_t.size(); ++j) {
        mu[j] = inv_sqrt_alpha * (x_t[j] - eps_coef * eps[j]);
    }
    return mu;
}

double gaussian_log_prob(const Vec& x, const Vec& mean, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_log_prob: sigma must be positive");
    check_same_dim(x, mean, "gaussian_log_prob");
    const double d = static_cast<double>(x.size());
    return -0.5 * d * std::log(kTwoPi * sigma * sigma) - dist2(x, mean) / (2.0 * sigma * sigma);
}

Trajectory sample_trajectory(const DenoiserParams& params, const NoiseSchedule& schedule,
                             Rng& rng) {
    const int T = schedule.T;
    const std::size_t d = static_cast<std::size_t>(params.dim);

    Trajectory traj;
    traj.rng_seed = rng.seed();
    traj.states.reserve(static_cast<std::size_t>(T) + 1);
    traj.means.reserve(static_cast<std::size_t>(T));
    traj.log_probs.reserve(static_cast<std::size_t>(T));

    traj.states.push_back(rng.normal_vec(d));
    for (int t = T; t >= 1; --t) {
        const Vec& x_t = traj.states.back();
        Vec mu = reverse_mean(params, x_t, t, schedule);
        const double sigma = schedule.sigmas[static_cast<std::size_t>(t)];
        Vec x_prev(d);
        for (std::size_t j = 0; j < d; ++j) x_prev[j] = mu[j] + sigma * rng.normal();
        traj.log_probs.push_back(gaussian_log_prob(x_prev, mu, sigma));
        traj.means.push_back(std::move(mu));
        traj.states.push_back(std::move(x_prev));
    }
    return traj;
}

double step_kl(const Vec& mean_new, const Vec& mean_old, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("step_kl: sigma must be positive");
    return dist2(mean_new, mean_old) / (2.0 * sigma * sigma);
}

}  // namespace fairdiff
