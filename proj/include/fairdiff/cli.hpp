// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace fairdiff {

/// Output directory resolution: absolute paths win; relative paths are
/// prefixed with $FAIRDIFF_OUT_ROOT when that variable is set.
std::string resolve_out_dir(const std::string& out);

/// The three pipeline phases. Each returns a process exit status, writes its
/// artifacts under <out>/run_<seed>/ and echoes the fully resolved config.
int cmd_pretrain(const std::string& config_path, const std::string& out_dir, int threads = 0);
int cmd_finetune(const std::string& config_path, const std::string& ckpt_path,
                 const std::string& out_dir, int threads = 0);
int cmd_evaluate(const std::string& ckpt_path, int n, std::uint64_t seed,
                 const std::string& out_dir, const std::string& config_path = "",
                 int threads = 0);

}  // namespace fairdiff
