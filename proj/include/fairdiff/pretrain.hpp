// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fairdiff/denoiser.hpp"
#include "fairdiff/diffusion.hpp"
#include "fairdiff/mixture.hpp"

namespace fairdiff {

struct PretrainConfig {
    int steps = 10000;
    int batch_size = 128;
    double learning_rate = 0.02;
    int hidden_width = 64;
    int embed_width = 8;

    void validate() const;
};

struct PretrainResult {
    DenoiserParams params;
    std::vector<double> loss_trace;  // one MSE value per step
};

/// Noise-prediction regression: minimize the mean squared error between the
/// injected noise and the network's prediction on forward-diffused samples,
/// uniform step indices, plain SGD with a fixed rate.
/// Throws TrainingError (with the step index) if the loss turns non-finite.
PretrainResult pretrain(const Dataset& dataset, const NoiseSchedule& schedule,
                        const PretrainConfig& config, Rng& rng);

}  // namespace fairdiff
