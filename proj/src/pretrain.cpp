// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/pretrain.hpp"

#include <cmath>
#include <string>

#include "fairdiff/errors.hpp"

namespace fairdiff {

void PretrainConfig::validate() const {
    if (steps < 1) throw ConfigError("PretrainConfig: steps must be >= 1");
    if (batch_size < 1) throw ConfigError("PretrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("PretrainConfig: learning_rate must be positive");
    if (hidden_width < 1) throw ConfigError("PretrainConfig: hidden_width must be >= 1");
    if (embed_width < 2 || embed_width % 2 != 0) {
        throw ConfigError("PretrainConfig: embed_width must be even and >= 2");
    }
}

PretrainResult pretrain(const Dataset& dataset, const NoiseSchedule& schedule,
                        const PretrainConfig& config, Rng& rng) {
    config.validate();
    if (dataset.size() == 0) throw ConfigError("pretrain: dataset is empty");

    const int d = static_cast<int>(dataset.points.front().size());
    PretrainResult result;
    result.params = init_params(rng, d, config.hidden_width, config.embed_width);
    result.loss_trace.reserve(static_cast<std::size_t>(config.steps));

    const double denom = static_cast<double>(config.batch_size) * d;

    for (int step = 0; step < config.steps; ++step) {
        ParamGrad grad = ParamGrad::zeros_like(result.params);
        double loss = 0.0;
        Vec d_out(static_cast<std::size_t>(d));

        for (int b = 0; b < config.batch_size; ++b) {
            const Vec& x0 = dataset.points[rng.uniform_index(dataset.size())];
            const int t = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(schedule.T))) + 1;
            const Vec noise = rng.normal_vec(static_cast<std::size_t>(d));
            const Vec x_t = forward_diffuse(x0, t, noise, schedule);

            const ForwardTrace trace = forward_traced(result.params, x_t, t);
            for (int j = 0; j < d; ++j) {
                const double residual = trace.out[static_cast<std::size_t>(j)] - noise[static_cast<std::size_t>(j)];
                loss += residual * residual / denom;
                d_out[static_cast<std::size_t>(j)] = 2.0 * residual / denom;
            }
            backward_into(result.params, trace, d_out, grad);
        }

        if (!std::isfinite(loss)) {
            throw TrainingError("pretrain: non-finite loss at step " + std::to_string(step));
        }
        apply_gradient(result.params, grad, config.learning_rate);
        result.loss_trace.push_back(loss);
    }
    return result;
}

}  // namespace fairdiff
