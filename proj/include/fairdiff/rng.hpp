// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "fairdiff/vec.hpp"

namespace fairdiff {

/// Seeded random stream with a fully pinned-down normal sampler.
///
/// The Gaussian draw is an in-house Box-Muller on top of mt19937_64 rather
/// than std::normal_distribution, so a given seed produces the same sequence
/// on every standard library. Streams for parallel work are derived with
/// derive_seed, never by sharing one generator.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// The seed this stream was constructed with.
    std::uint64_t seed() const { return seed_; }

    /// Uniform draw in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal draw.
    double normal();

    /// d independent standard normal draws.
    Vec normal_vec(std::size_t d) {
        Vec out(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = normal();
        return out;
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic sub-stream seed from (master, a, b), splitmix64-style mixing.
/// Used to give every trajectory / batch element its own independent stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace fairdiff
