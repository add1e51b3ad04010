// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace fairdiff {

/// One completed outer fine-tuning step.
///
/// q_ratio is -1 when the step's batch had no classified sample (the run
/// records the degenerate step but performs no update); every other field is
/// finite by construction.
struct StepRecord {
    int step = 0;
    double mean_reward = 0.0;
    double q_ratio = -1.0;
    double loss = 0.0;
    double mean_kl = 0.0;
    double clip_or_rollback_frac = 0.0;
    double wall_ms = 0.0;
};

struct RunLog {
    std::vector<StepRecord> steps;
};

}  // namespace fairdiff
