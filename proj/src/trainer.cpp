// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "fairdiff/errors.hpp"

namespace fairdiff {

void TrainerConfig::validate() const {
    if (!(clip_eps > 0.0) || !(clip_eps < 1.0)) throw ConfigError("TrainerConfig: clip_eps must lie in (0,1)");
    if (!(kl_delta > 0.0)) throw ConfigError("TrainerConfig: kl_delta must be positive");
    if (!(rollback_coef > 0.0)) throw ConfigError("TrainerConfig: rollback_coef must be positive");
    if (inner_epochs < 1) throw ConfigError("TrainerConfig: inner_epochs must be >= 1");
    if (batch_size < 2) throw ConfigError("TrainerConfig: batch_size must be >= 2");
    if (!(learning_rate > 0.0)) throw ConfigError("TrainerConfig: learning_rate must be positive");
    if (max_outer_steps < 0) throw ConfigError("TrainerConfig: max_outer_steps must be >= 0");
    if (!(balance_tolerance >= 0.0)) throw ConfigError("TrainerConfig: balance_tolerance must be >= 0");
    if (!(classifier_threshold > 0.5) || !(classifier_threshold <= 1.0)) {
        throw ConfigError("TrainerConfig: classifier_threshold must lie in (0.5, 1]");
    }
    if (checkpoint_every < 1) throw ConfigError("TrainerConfig: checkpoint_every must be >= 1");
    if (threads < 1) throw ConfigError("TrainerConfig: threads must be >= 1");
    if (reward_kind == RewardKind::Shift && underrepresented.has_value() &&
        *underrepresented == ClassLabel::None) {
        throw ConfigError("TrainerConfig: underrepresented class must be A or B");
    }
}

std::vector<Trajectory> collect_rollouts(const DenoiserParams& params, int n,
                                         const NoiseSchedule& schedule,
                                         std::uint64_t master_seed, std::uint64_t outer_step,
                                         int threads) {
    if (n < 2) throw ConfigError("collect_rollouts: need at least 2 trajectories");
    std::vector<Trajectory> batch(static_cast<std::size_t>(n));

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            Rng rng(derive_seed(master_seed, outer_step, static_cast<std::uint64_t>(i)));
            batch[static_cast<std::size_t>(i)] = sample_trajectory(params, schedule, rng);
        }
    };

    const int workers = std::min(threads, n);
    if (workers <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const int chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return batch;
}

AdvantageBatch compute_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2) throw ConfigError("compute_advantages: need at least 2 rewards");
    AdvantageBatch out;
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;
    out.reward_mean = mean;
    out.reward_std = std::sqrt(var);
    out.advantages.reserve(rewards.size());
    const double denom = out.reward_std + 1e-8;
    for (double r : rewards) out.advantages.push_back((r - mean) / denom);
    return out;
}

double surrogate_clip(double ratio, double advantage, double clip_eps) {
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    return std::min(ratio * advantage, clipped * advantage);
}

double surrogate_rollback(double ratio, double advantage, double kl, double kl_delta,
                          double rollback_coef) {
    double value = ratio * advantage;
    if (kl > kl_delta) value -= rollback_coef * (kl - kl_delta);
    return value;
}

namespace {

struct StepCoefs {
    double sigma;
    double inv_sigma2;
    double inv_sqrt_alpha;
    double eps_coef;  // beta_t / sqrt(1 - abar_t)
};

std::vector<StepCoefs> precompute_coefs(const NoiseSchedule& schedule) {
    std::vector<StepCoefs> coefs(static_cast<std::size_t>(schedule.T) + 1);
    for (int t = 1; t <= schedule.T; ++t) {
        const std::size_t i = static_cast<std::size_t>(t);
        coefs[i].sigma = schedule.sigmas[i];
        coefs[i].inv_sigma2 = 1.0 / (schedule.sigmas[i] * schedule.sigmas[i]);
        coefs[i].inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alphas[i]);
        coefs[i].eps_coef = schedule.betas[i] / std::sqrt(1.0 - schedule.alpha_bars[i]);
    }
    return coefs;
}

}  // namespace

SurrogatePass surrogate_pass(const DenoiserParams& current, const std::vector<Trajectory>& batch,
                             const AdvantageBatch& advantages, const TrainerConfig& config,
                             const NoiseSchedule& schedule) {
    if (batch.size() != advantages.advantages.size()) {
        throw ShapeError("surrogate_pass: one advantage per trajectory required");
    }
    if (batch.empty()) throw ConfigError("surrogate_pass: empty batch");

    const int T = schedule.T;
    const auto coefs = precompute_coefs(schedule);
    const double n_terms = static_cast<double>(batch.size()) * T;

    SurrogatePass pass;
    pass.grad = ParamGrad::zeros_like(current);
    double surrogate_sum = 0.0;
    std::size_t triggered = 0;
    Vec d_out(static_cast<std::size_t>(current.dim));

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Trajectory& traj = batch[i];
        const double adv = advantages.advantages[i];
        for (int k = 0; k < T; ++k) {
            const int t = T - k;
            const StepCoefs& c = coefs[static_cast<std::size_t>(t)];
            const Vec& x_t = traj.states[static_cast<std::size_t>(k)];
            const Vec& x_prev = traj.states[static_cast<std::size_t>(k) + 1];

            const ForwardTrace trace = forward_traced(current, x_t, t);
            Vec mu(x_t.size());
            for (std::size_t j = 0; j < x_t.size(); ++j) {
                mu[j] = c.inv_sqrt_alpha * (x_t[j] - c.eps_coef * trace.out[j]);
            }
            const double logp_new = gaussian_log_prob(x_prev, mu, c.sigma);
            const double ratio = std::exp(logp_new - traj.log_probs[static_cast<std::size_t>(k)]);
            const double kl =
                dist2(mu, traj.means[static_cast<std::size_t>(k)]) * 0.5 * c.inv_sigma2;

            // Surrogate value plus its derivatives w.r.t. ratio and mu.
            double sur;
            double dsur_dratio;
            double rollback_mu_coef = 0.0;  // d(sur)/d(mu) = coef * (mu - mu_old)
            if (config.variant == TrustRegion::Clip) {
                const double unclipped = ratio * adv;
                const double clipped =
                    std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps) * adv;
                if (unclipped <= clipped) {
                    sur = unclipped;
                    dsur_dratio = adv;
                } else {
                    sur = clipped;
                    dsur_dratio = 0.0;  // clamp saturated, gradient deadzone
                }
                if ((adv > 0.0 && ratio > 1.0 + config.clip_eps) ||
                    (adv < 0.0 && ratio < 1.0 - config.clip_eps)) {
                    ++triggered;
                }
            } else {
                sur = ratio * adv;
                dsur_dratio = adv;
                if (kl > config.kl_delta) {
                    sur -= config.rollback_coef * (kl - config.kl_delta);
                    rollback_mu_coef = -config.rollback_coef * c.inv_sigma2;
                    ++triggered;
                }
            }
            surrogate_sum += sur;

            // Loss = -mean(surrogate); chain through ratio -> logp -> mu,
            // then mu -> network output (an affine map with slope
            // -inv_sqrt_alpha * eps_coef).
            const double dlogp_scale = dsur_dratio * ratio * c.inv_sigma2;
            const double out_scale = -(1.0 / n_terms) * (-c.inv_sqrt_alpha * c.eps_coef);
            for (std::size_t j = 0; j < mu.size(); ++j) {
                double dmu = dlogp_scale * (x_prev[j] - mu[j]);
                dmu += rollback_mu_coef * (mu[j] - traj.means[static_cast<std::size_t>(k)][j]);
                d_out[j] = out_scale * dmu;
            }
            backward_into(current, trace, d_out, pass.grad);
        }
    }

    pass.loss = -surrogate_sum / n_terms;
    pass.trigger_frac = static_cast<double>(triggered) / n_terms;
    return pass;
}

std::pair<DenoiserParams, UpdateStats> update_step(const DenoiserParams& params,
                                                   const std::vector<Trajectory>& batch,
                                                   const AdvantageBatch& advantages,
                                                   const TrainerConfig& config,
                                                   const NoiseSchedule& schedule) {
    const int T = schedule.T;
    const auto coefs = precompute_coefs(schedule);
    const double n_terms = static_cast<double>(batch.size()) * T;

    DenoiserParams cur = params;
    UpdateStats stats;

    for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
        const SurrogatePass pass = surrogate_pass(cur, batch, advantages, config, schedule);
        if (!std::isfinite(pass.loss)) {
            throw TrainingError("update_step: non-finite loss in inner epoch " +
                                std::to_string(epoch));
        }
        if (!pass.grad.all_finite()) {
            throw TrainingError("update_step: non-finite gradient in inner epoch " +
                                std::to_string(epoch));
        }
        if (epoch == config.inner_epochs - 1) {
            stats.loss = pass.loss;
            stats.trigger_frac = pass.trigger_frac;
        }
        apply_gradient(cur, pass.grad, config.learning_rate);
    }

    // KL of the policy actually shipped, measured against the rollout policy.
    double kl_sum = 0.0;
    for (const Trajectory& traj : batch) {
        for (int k = 0; k < T; ++k) {
            const int t = T - k;
            const StepCoefs& c = coefs[static_cast<std::size_t>(t)];
            const Vec mu = reverse_mean(cur, traj.states[static_cast<std::size_t>(k)], t, schedule);
            kl_sum += dist2(mu, traj.means[static_cast<std::size_t>(k)]) * 0.5 * c.inv_sigma2;
        }
    }
    stats.mean_kl = kl_sum / n_terms;
    return {std::move(cur), stats};
}

FinetuneResult finetune(const DenoiserParams& base, const TrainerConfig& config,
                        const MixtureSpec& spec, const NoiseSchedule& schedule,
                        const std::function<void(int, const DenoiserParams&)>& checkpoint_sink) {
    config.validate();
    spec.validate();
    if (config.reward_kind == RewardKind::Shift && config.underrepresented.has_value() &&
        *config.underrepresented == ClassLabel::None) {
        throw ConfigError("finetune: underrepresented class must be A or B");
    }

    FinetuneResult result;
    result.params = base;
    int balanced_streak = 0;

    for (int step = 0; step < config.max_outer_steps; ++step) {
        const auto t0 = std::chrono::steady_clock::now();

        const auto batch = collect_rollouts(result.params, config.batch_size, schedule,
                                            config.master_seed,
                                            static_cast<std::uint64_t>(step), config.threads);
        std::vector<Vec> terminals;
        terminals.reserve(batch.size());
        for (const auto& traj : batch) terminals.push_back(traj.terminal());
        const auto outputs = classify_batch(terminals, spec, config.classifier_threshold);
        const auto q = ratio_q(outputs);

        auto elapsed_ms = [&t0] {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t0)
                .count();
        };

        StepRecord rec;
        rec.step = step;
        rec.q_ratio = q.value_or(-1.0);

        if (!q.has_value()) {
            // Nothing classified: the ratio and both rewards are undefined,
            // so the step is recorded and skipped.
            balanced_streak = 0;
            rec.wall_ms = elapsed_ms();
            result.log.steps.push_back(rec);
            continue;
        }

        std::vector<double> rewards;
        if (config.reward_kind == RewardKind::Shift) {
            const ClassLabel u = config.underrepresented.value_or(
                *q < 0.5 ? ClassLabel::A : ClassLabel::B);
            rewards = reward_shift(outputs, u);
        } else {
            rewards = reward_balance(outputs).rewards;
        }

        const AdvantageBatch adv = compute_advantages(rewards);
        auto [updated, stats] = update_step(result.params, batch, adv, config, schedule);
        result.params = std::move(updated);

        double reward_sum = 0.0;
        for (double r : rewards) reward_sum += r;
        rec.mean_reward = reward_sum / static_cast<double>(rewards.size());
        rec.loss = stats.loss;
        rec.mean_kl = stats.mean_kl;
        rec.clip_or_rollback_frac = stats.trigger_frac;
        rec.wall_ms = elapsed_ms();
        result.log.steps.push_back(rec);

        if (checkpoint_sink && (step + 1) % config.checkpoint_every == 0) {
            checkpoint_sink(step + 1, result.params);
        }

        const bool within = std::abs(*q - 0.5) <= config.balance_tolerance;
        if (config.reward_kind == RewardKind::Shift) {
            // The automatic-U loop stops at balance; a fixed U keeps shifting.
            if (!config.underrepresented.has_value() && within) break;
        } else {
            balanced_streak = within ? balanced_streak + 1 : 0;
            if (balanced_streak >= 10) break;
        }
    }

    if (checkpoint_sink) {
        checkpoint_sink(static_cast<int>(result.log.steps.size()), result.params);
    }
    return result;
}

}  // namespace fairdiff
