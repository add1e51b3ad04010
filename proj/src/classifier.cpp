// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/classifier.hpp"

#include <cmath>

#include "fairdiff/errors.hpp"

namespace fairdiff {

const char* to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::A: return "A";
        case ClassLabel::B: return "B";
        case ClassLabel::None: return "None";
    }
    return "?";
}

ClassifierOutput classify(const Vec& x, const MixtureSpec& spec, double threshold) {
    if (!(threshold > 0.5) || !(threshold <= 1.0)) {
        throw ConfigError("classify: threshold must lie in (0.5, 1]");
    }
    // Equal-prior posterior: p_a = phi_a / (phi_a + phi_b) with isotropic
    // Gaussian densities of common sigma, so the normalizers cancel and
    // p_a = logistic((||x-c_b||^2 - ||x-c_a||^2) / (2 sigma^2)).
    const double s2 = spec.mode_sigma * spec.mode_sigma;
    const double log_ratio = (dist2(x, spec.mode_b_center) - dist2(x, spec.mode_a_center)) / (2.0 * s2);

    ClassifierOutput out;
    out.p_a = 1.0 / (1.0 + std::exp(-log_ratio));
    const double winner = std::max(out.p_a, out.p_b());
    if (winner < threshold) {
        out.label = ClassLabel::None;
    } else {
        out.label = out.p_a >= out.p_b() ? ClassLabel::A : ClassLabel::B;
    }
    return out;
}

std::vector<ClassifierOutput> classify_batch(const std::vector<Vec>& points,
                                             const MixtureSpec& spec, double threshold) {
    std::vector<ClassifierOutput> outputs;
    outputs.reserve(points.size());
    for (const Vec& p : points) outputs.push_back(classify(p, spec, threshold));
    return outputs;
}

std::vector<double> reward_shift(const std::vector<ClassifierOutput>& outputs,
                                 ClassLabel underrepresented) {
    if (underrepresented == ClassLabel::None) {
        throw ConfigError("reward_shift: underrepresented class must be A or B");
    }
    std::vector<double> rewards;
    rewards.reserve(outputs.size());
    for (const auto& o : outputs) rewards.push_back(o.prob_of(underrepresented));
    return rewards;
}

std::optional<double> ratio_q(const std::vector<ClassifierOutput>& outputs) {
    std::size_t a = 0, b = 0;
    for (const auto& o : outputs) {
        if (o.label == ClassLabel::A) ++a;
        if (o.label == ClassLabel::B) ++b;
    }
    if (a + b == 0) return std::nullopt;
    return static_cast<double>(a) / static_cast<double>(a + b);
}

RewardBatch reward_balance(const std::vector<ClassifierOutput>& outputs) {
    RewardBatch batch;
    batch.outputs = outputs;
    for (const auto& o : outputs) {
        if (o.label == ClassLabel::A) ++batch.a_count;
        if (o.label == ClassLabel::B) ++batch.b_count;
    }
    const std::size_t classified = batch.a_count + batch.b_count;
    if (classified == 0) {
        throw UndefinedRatioError("reward_balance: no classified sample in batch");
    }
    const double q = static_cast<double>(batch.a_count) / static_cast<double>(classified);
    batch.q = q;
    batch.indicator = q < 0.5 ? 1 : 0;
    // indicator = 1 marks class A as the minority; the minority class earns
    // +|q-0.5| per sample, the majority -|q-0.5|, abstentions 0.
    const ClassLabel minority = batch.indicator == 1 ? ClassLabel::A : ClassLabel::B;
    batch.underrepresented = minority;
    const double magnitude = std::abs(q - 0.5);
    batch.rewards.reserve(outputs.size());
    for (const auto& o : outputs) {
        if (o.label == ClassLabel::None) {
            batch.rewards.push_back(0.0);
        } else {
            batch.rewards.push_back(o.label == minority ? magnitude : -magnitude);
        }
    }
    return batch;
}

}  // namespace fairdiff
