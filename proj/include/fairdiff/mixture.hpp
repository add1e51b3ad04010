// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fairdiff/rng.hpp"
#include "fairdiff/vec.hpp"

namespace fairdiff {

/// Two-mode isotropic Gaussian mixture the base model is trained on.
/// weight_a is the true frequency of mode A, the attribute the pipeline
/// later has to rebalance. Modes must sit at least 4 sigma apart so the
/// posterior classifier is sharp.
struct MixtureSpec {
    Vec mode_a_center;
    Vec mode_b_center;
    double mode_sigma = 0.3;
    double weight_a = 0.1;

    std::size_t dim() const { return mode_a_center.size(); }
    /// Throws ConfigError when any invariant is broken.
    void validate() const;
};

/// Default spec: centers (-2,0) and (+2,0), sigma 0.3, weight_a 0.1.
MixtureSpec default_mixture();

struct Dataset {
    std::vector<Vec> points;
    std::vector<int> mode_labels;  // 0 = mode A, 1 = mode B; evaluation only

    std::size_t size() const { return points.size(); }
};

/// Draw n points: mode A with probability weight_a, else mode B, isotropic
/// Gaussian around the chosen center.
Dataset sample_dataset(const MixtureSpec& spec, std::size_t n, Rng& rng);

}  // namespace fairdiff
