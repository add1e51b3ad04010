// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "fairdiff/mixture.hpp"
#include "fairdiff/pretrain.hpp"
#include "fairdiff/trainer.hpp"

namespace fairdiff {

/// Every knob of a run, one JSON document. Field names are the JSON keys.
/// Unknown keys are rejected; missing keys take the defaults below and the
/// fully resolved document is echoed next to the outputs.
struct RunConfig {
    // Data distribution.
    std::vector<double> mode_a_center = {-2.0, 0.0};
    std::vector<double> mode_b_center = {2.0, 0.0};
    double mode_sigma = 0.3;
    double weight_a = 0.1;

    // Noise schedule.
    int T = 50;
    double beta_min = 0.002;
    double beta_max = 0.3;

    // Network.
    int hidden_width = 64;
    int embed_width = 8;

    // Pretraining.
    int dataset_size = 8192;
    int pretrain_steps = 10000;
    int pretrain_batch = 128;
    double pretrain_lr = 0.02;

    // Fine-tuning.
    std::string variant = "clip";          // clip | rollback
    double clip_eps = 0.2;
    double kl_delta = 0.02;
    double rollback_coef = 5.0;
    int inner_epochs = 4;
    int batch_size = 64;
    double learning_rate = 3e-3;
    int max_outer_steps = 100;
    std::string reward_kind = "balance";   // shift | balance
    std::string underrepresented = "auto"; // A | B | auto
    double balance_tolerance = 0.05;
    double classifier_threshold = 0.7;
    int checkpoint_every = 10;
    int threads = 1;

    // Run identity.
    std::uint64_t seed = 12345;
    int eval_samples = 1000;  // samples drawn when measuring a model's ratio

    MixtureSpec mixture() const;
    NoiseSchedule schedule() const;
    PretrainConfig pretrain_config() const;
    TrainerConfig trainer_config() const;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Parse a JSON document; missing keys default, unknown keys throw.
RunConfig parse_run_config(const std::string& json_text);

/// Read and parse a config file.
RunConfig load_run_config(const std::string& path);

/// Serialize with every field present, keys sorted.
std::string run_config_to_json(const RunConfig& config);

}  // namespace fairdiff
