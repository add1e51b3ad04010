// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fairdiff/denoiser.hpp"

namespace fairdiff {

// Binary checkpoint, little-endian:
//   magic "FDCK", u32 version = 1,
//   u32 dim, u32 hidden, u32 embed, u32 tensor count = 6,
//   per tensor: u32 rows, u32 cols (order w1,b1,w2,b2,w3,b3; biases are n x 1),
//   then every tensor's values as raw IEEE-754 float64, row-major.
// save followed by load reproduces the parameters bit for bit.

void save_checkpoint(const DenoiserParams& params, const std::string& path);

/// Throws IoError on unreadable, truncated, or foreign files.
DenoiserParams load_checkpoint(const std::string& path);

}  // namespace fairdiff
