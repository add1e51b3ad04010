// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/mixture.hpp"

#include <cmath>

#include "fairdiff/errors.hpp"

namespace fairdiff {

void MixtureSpec::validate() const {
    if (mode_a_center.empty() || mode_a_center.size() != mode_b_center.size()) {
        throw ConfigError("MixtureSpec: mode centers must be non-empty and of equal dimension");
    }
    if (!(mode_sigma > 0.0)) throw ConfigError("MixtureSpec: mode_sigma must be positive");
    if (!(weight_a > 0.0) || !(weight_a < 1.0)) {
        throw ConfigError("MixtureSpec: weight_a must lie in (0,1)");
    }
    const double sep = std::sqrt(dist2(mode_a_center, mode_b_center));
    if (sep <= 0.0) throw ConfigError("MixtureSpec: mode centers must be distinct");
    if (sep / mode_sigma < 4.0) {
        throw ConfigError("MixtureSpec: mode separation must be at least 4 mode_sigma");
    }
}

MixtureSpec default_mixture() {
    MixtureSpec spec;
    spec.mode_a_center = {-2.0, 0.0};
    spec.mode_b_center = {2.0, 0.0};
    spec.mode_sigma = 0.3;
    spec.weight_a = 0.1;
    return spec;
}

Dataset sample_dataset(const MixtureSpec& spec, std::size_t n, Rng& rng) {
    // weight_a = 0 or 1 is allowed here (degenerate single-mode draws used in
    // tests); validate() is for configured runs.
    if (spec.mode_a_center.empty() || spec.mode_a_center.size() != spec.mode_b_center.size()) {
        throw ConfigError("sample_dataset: bad mode centers");
    }
    const std::size_t d = spec.dim();
    Dataset ds;
    ds.points.reserve(n);
    ds.mode_labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool from_a = rng.uniform() < spec.weight_a;
        const Vec& center = from_a ? spec.mode_a_center : spec.mode_b_center;
        Vec p(d);
        for (std::size_t j = 0; j < d; ++j) p[j] = center[j] + spec.mode_sigma * rng.normal();
        ds.points.push_back(std::move(p));
        ds.mode_labels.push_back(from_a ? 0 : 1);
    }
    return ds;
}

}  // namespace fairdiff
