// SPDX-License-Identifier: Apache-2.0
//
// fairdiff: pretrain a small point-cloud diffusion model on an imbalanced
// two-mode mixture, fine-tune it with classifier-driven policy gradients
// until the measured class ratio shifts or balances, and evaluate the result.

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "fairdiff/cli.hpp"
#include "fairdiff/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Bias-aware fine-tuning of a toy diffusion model"};
    app.require_subcommand(1);
    app.footer("Config keys and their defaults (any key may be omitted):\n" +
               fairdiff::run_config_to_json(fairdiff::RunConfig{}) +
               "Relative --out paths are placed under $FAIRDIFF_OUT_ROOT when it is set.");

    std::string config_path, ckpt_path, out_dir = "out";
    int n = 1000;
    std::uint64_t seed = 12345;
    int threads = 0;

    auto* pre = app.add_subcommand("pretrain", "Train the base model on the mixture dataset");
    pre->add_option("--config", config_path, "Run configuration (JSON)")->required();
    pre->add_option("--out", out_dir, "Output directory (default: out)");
    pre->add_option("--threads", threads, "Worker threads for rollout collection");

    auto* fin = app.add_subcommand("finetune", "Policy-gradient fine-tuning from a checkpoint");
    fin->add_option("--config", config_path, "Run configuration (JSON)")->required();
    fin->add_option("--ckpt", ckpt_path, "Base model checkpoint")->required();
    fin->add_option("--out", out_dir, "Output directory (default: out)");
    fin->add_option("--threads", threads, "Worker threads for rollout collection");

    auto* eva = app.add_subcommand("evaluate", "Sample a checkpoint and report class ratios");
    eva->add_option("--ckpt", ckpt_path, "Model checkpoint")->required();
    eva->add_option("--n", n, "Number of samples (default: 1000)");
    eva->add_option("--seed", seed, "Sampling seed (default: 12345)");
    eva->add_option("--out", out_dir, "Output directory (default: out)");
    eva->add_option("--config", config_path, "Optional run configuration (JSON)");
    eva->add_option("--threads", threads, "Worker threads for rollout collection");

    CLI11_PARSE(app, argc, argv);

    if (pre->parsed()) return fairdiff::cmd_pretrain(config_path, out_dir, threads);
    if (fin->parsed()) return fairdiff::cmd_finetune(config_path, ckpt_path, out_dir, threads);
    return fairdiff::cmd_evaluate(ckpt_path, n, seed, out_dir, config_path, threads);
}
