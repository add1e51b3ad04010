// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fairdiff/classifier.hpp"
#include "fairdiff/diffusion.hpp"
#include "fairdiff/mixture.hpp"
#include "fairdiff/runlog.hpp"

namespace fairdiff {

enum class TrustRegion { Clip, Rollback };
enum class RewardKind { Shift, Balance };

/// Everything the fine-tuning loop needs to know.
struct TrainerConfig {
    TrustRegion variant = TrustRegion::Clip;
    double clip_eps = 0.2;
    double kl_delta = 0.02;       // trust-region trigger
    double rollback_coef = 5.0;   // penalty slope past the trigger
    int inner_epochs = 4;
    int batch_size = 64;          // trajectories per outer step
    double learning_rate = 3e-3;
    int max_outer_steps = 100;
    RewardKind reward_kind = RewardKind::Balance;
    // Fixed underrepresented class for shift runs; empty = re-determined
    // from each batch's ratio.
    std::optional<ClassLabel> underrepresented;
    double balance_tolerance = 0.05;
    double classifier_threshold = 0.7;
    std::uint64_t master_seed = 0;
    int checkpoint_every = 10;  // outer steps between checkpoint callbacks
    int threads = 1;            // rollout collection only; results identical for any value

    /// Throws ConfigError when any invariant is broken.
    void validate() const;
};

/// Centered and scaled terminal rewards, one advantage per trajectory.
struct AdvantageBatch {
    std::vector<double> advantages;
    double reward_mean = 0.0;
    double reward_std = 0.0;  // population std of the raw rewards
};

/// Statistics of one update_step call.
struct UpdateStats {
    double loss = 0.0;          // surrogate loss of the final optimization pass
    double mean_kl = 0.0;       // mean per-step KL(updated || rollout), after all passes
    double trigger_frac = 0.0;  // clipped-to-zero-gradient or rolled-back terms, final pass
};

/// Result of a full fine-tuning run.
struct FinetuneResult {
    DenoiserParams params;
    RunLog log;
};

/// n independent rollouts under frozen params. Trajectory i uses the stream
/// seeded by derive_seed(master_seed, outer_step, i), so results are
/// identical for any thread count.
std::vector<Trajectory> collect_rollouts(const DenoiserParams& params, int n,
                                         const NoiseSchedule& schedule,
                                         std::uint64_t master_seed, std::uint64_t outer_step,
                                         int threads = 1);

/// advantage_i = (r_i - mean) / (std + 1e-8); constant rewards give zeros.
/// Throws ConfigError for fewer than 2 rewards.
AdvantageBatch compute_advantages(const std::vector<double>& rewards);

/// Clipped importance-ratio term to maximize:
/// min(ratio * A, clamp(ratio, 1-eps, 1+eps) * A).
double surrogate_clip(double ratio, double advantage, double clip_eps);

/// KL-triggered rollback term to maximize:
/// ratio * A - rollback_coef * max(0, kl - kl_delta).
double surrogate_rollback(double ratio, double advantage, double kl, double kl_delta,
                          double rollback_coef);

/// One optimization pass over the batch: the surrogate loss under `current`,
/// its exact gradient, and the fraction of trust-region-triggered terms.
struct SurrogatePass {
    double loss = 0.0;
    ParamGrad grad;
    double trigger_frac = 0.0;
};

/// Evaluate loss and gradient of the configured surrogate at `current`
/// against trajectories rolled out under the old policy. One update_step
/// inner epoch is exactly one pass followed by a gradient step.
SurrogatePass surrogate_pass(const DenoiserParams& current, const std::vector<Trajectory>& batch,
                             const AdvantageBatch& advantages, const TrainerConfig& config,
                             const NoiseSchedule& schedule);

/// Multi-epoch policy update on one rollout batch. Trajectories must have
/// been sampled under `params`; their stored log_probs are the old-policy
/// log-probabilities. Returns the updated parameters and the step statistics.
/// Throws TrainingError if the loss or gradient turns non-finite.
std::pair<DenoiserParams, UpdateStats> update_step(const DenoiserParams& params,
                                                   const std::vector<Trajectory>& batch,
                                                   const AdvantageBatch& advantages,
                                                   const TrainerConfig& config,
                                                   const NoiseSchedule& schedule);

/// Outer loop: collect -> classify -> reward -> advantages -> update, with
/// the configured stopping rule. checkpoint_sink, when set, is called every
/// checkpoint_every steps and once more at the end.
FinetuneResult finetune(const DenoiserParams& base, const TrainerConfig& config,
                        const MixtureSpec& spec, const NoiseSchedule& schedule,
                        const std::function<void(int, const DenoiserParams&)>& checkpoint_sink = {});

}  // namespace fairdiff
