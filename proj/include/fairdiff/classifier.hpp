// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "fairdiff/mixture.hpp"
#include "fairdiff/vec.hpp"

namespace fairdiff {

/// Classifier verdict for one sample. None means the classifier abstained
/// because neither class probability reached the confidence threshold.
enum class ClassLabel { A, B, None };

const char* to_string(ClassLabel label);

struct ClassifierOutput {
    double p_a = 0.5;  // probability of class A; p_b = 1 - p_a
    ClassLabel label = ClassLabel::None;

    double p_b() const { return 1.0 - p_a; }
    double prob_of(ClassLabel cls) const { return cls == ClassLabel::A ? p_a : p_b(); }
};

/// Per-batch classification summary plus the rewards computed from it.
struct RewardBatch {
    std::vector<ClassifierOutput> outputs;
    std::size_t a_count = 0;                 // samples labelled A
    std::size_t b_count = 0;                 // samples labelled B
    std::optional<double> q;                 // a_count / (a_count + b_count)
    std::vector<double> rewards;             // per sample
    ClassLabel underrepresented = ClassLabel::None;
    int indicator = 0;                       // 1 iff q < 0.5
};

/// Equal-prior Bayes posterior of mode A at x: the classifier judges
/// appearance alone, ignoring how often each mode occurs in training data.
/// Labels A or B when the winning probability reaches the threshold,
/// otherwise None. threshold must lie in (0.5, 1].
ClassifierOutput classify(const Vec& x, const MixtureSpec& spec, double threshold);

std::vector<ClassifierOutput> classify_batch(const std::vector<Vec>& points,
                                             const MixtureSpec& spec, double threshold);

/// Continuous shift reward: the classifier probability of the
/// underrepresented class, for every sample including abstentions.
std::vector<double> reward_shift(const std::vector<ClassifierOutput>& outputs,
                                 ClassLabel underrepresented);

/// Fraction of classified samples labelled A; abstentions are excluded from
/// both counts. Empty when no sample was classified.
std::optional<double> ratio_q(const std::vector<ClassifierOutput>& outputs);

/// Balance reward: classified samples get +/-|q - 0.5| signed by membership
/// in the minority class; abstentions get 0. Throws UndefinedRatioError when
/// no sample is classified.
RewardBatch reward_balance(const std::vector<ClassifierOutput>& outputs);

}  // namespace fairdiff
