// SPDX-License-Identifier: Apache-2.0
//
// Test-side reference implementations. Everything here is written straight
// from the defining formulas, independent of the library code paths it is
// used to check, and deliberately does not share helpers with them.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Sequential product: abar_t for a linear beta ramp.
inline std::vector<double> alpha_bar_product(int T, double beta_min, double beta_max) {
    std::vector<double> abar(static_cast<std::size_t>(T) + 1, 1.0);
    for (int t = 1; t <= T; ++t) {
        const double beta = beta_min + (beta_max - beta_min) * (t - 1) / double(T - 1);
        abar[static_cast<std::size_t>(t)] = abar[static_cast<std::size_t>(t) - 1] * (1.0 - beta);
    }
    return abar;
}

// Isotropic Gaussian log-density, summed per coordinate.
inline double log_normal(const std::vector<double>& x, const std::vector<double>& mean,
                         double sigma) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (x[i] - mean[i]) / sigma;
        acc += -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
    }
    return acc;
}

// Equal-prior two-mode posterior from raw densities.
inline double posterior_a(const std::vector<double>& x, const std::vector<double>& ca,
                          const std::vector<double>& cb, double sigma) {
    double da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        da += (x[i] - ca[i]) * (x[i] - ca[i]);
        db += (x[i] - cb[i]) * (x[i] - cb[i]);
    }
    const double phi_a = std::exp(-da / (2.0 * sigma * sigma));
    const double phi_b = std::exp(-db / (2.0 * sigma * sigma));
    return phi_a / (phi_a + phi_b);
}

// Plain two-hidden-layer tanh MLP evaluated index by index; weights are the
// same row-major blocks the library uses but walked with explicit loops.
struct TinyMlp {
    int d, h, e;
    std::vector<double> w1, b1, w2, b2, w3, b3;

    std::vector<double> eval(const std::vector<double>& x, int t) const {
        std::vector<double> in(static_cast<std::size_t>(d + e));
        for (int i = 0; i < d; ++i) in[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        const int pairs = e / 2;
        for (int k = 0; k < pairs; ++k) {
            const double freq = std::pow(10000.0, -double(k) / pairs);
            in[static_cast<std::size_t>(d + 2 * k)] = std::sin(t * freq);
            in[static_cast<std::size_t>(d + 2 * k + 1)] = std::cos(t * freq);
        }
        std::vector<double> a1(static_cast<std::size_t>(h));
        for (int r = 0; r < h; ++r) {
            double s = b1[static_cast<std::size_t>(r)];
            for (int c = 0; c < d + e; ++c) s += w1[static_cast<std::size_t>(r * (d + e) + c)] * in[static_cast<std::size_t>(c)];
            a1[static_cast<std::size_t>(r)] = std::tanh(s);
        }
        std::vector<double> a2(static_cast<std::size_t>(h));
        for (int r = 0; r < h; ++r) {
            double s = b2[static_cast<std::size_t>(r)];
            for (int c = 0; c < h; ++c) s += w2[static_cast<std::size_t>(r * h + c)] * a1[static_cast<std::size_t>(c)];
            a2[static_cast<std::size_t>(r)] = std::tanh(s);
        }
        std::vector<double> out(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r) {
            double s = b3[static_cast<std::size_t>(r)];
            for (int c = 0; c < h; ++c) s += w3[static_cast<std::size_t>(r * h + c)] * a2[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] = s;
        }
        return out;
    }
};

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

}  // namespace oracle
