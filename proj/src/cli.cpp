// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fairdiff/checkpoint.hpp"
#include "fairdiff/classifier.hpp"
#include "fairdiff/config.hpp"
#include "fairdiff/errors.hpp"
#include "fairdiff/metrics.hpp"
#include "fairdiff/pretrain.hpp"
#include "fairdiff/trainer.hpp"

namespace fairdiff {

namespace fs = std::filesystem;

namespace {

// Distinct stream tags per phase so no phase replays another's randomness.
constexpr std::uint64_t kDatasetTag = 0x64617461;   // "data"
constexpr std::uint64_t kPretrainTag = 0x70726574;  // "pret"
constexpr std::uint64_t kEvalTag = 0x6576616c;      // "eval"

fs::path make_run_dir(const std::string& out_dir, std::uint64_t seed) {
    fs::path dir = fs::path(out_dir) / ("run_" + std::to_string(seed));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

/// n terminal samples under frozen params; trajectory i uses the stream
/// derive_seed(master, 0, i), matching the rollout seeding convention.
std::vector<Vec> sample_terminals(const DenoiserParams& params, const NoiseSchedule& schedule,
                                  std::uint64_t master, int n) {
    std::vector<Vec> terminals;
    terminals.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(master, 0, static_cast<std::uint64_t>(i)));
        terminals.push_back(sample_trajectory(params, schedule, rng).terminal());
    }
    return terminals;
}

std::string classification_csv(const std::vector<Vec>& points,
                               const std::vector<ClassifierOutput>& outputs) {
    std::ostringstream csv;
    csv << "sample_index";
    const std::size_t d = points.empty() ? 0 : points.front().size();
    for (std::size_t j = 0; j < d; ++j) csv << ",x_" << (j + 1);
    csv << ",p_a,label\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        csv << i;
        for (double v : points[i]) csv << ',' << format_full(v);
        csv << ',' << format_full(outputs[i].p_a) << ',' << to_string(outputs[i].label) << '\n';
    }
    return csv.str();
}

std::string dataset_csv(const Dataset& ds) {
    std::ostringstream csv;
    const std::size_t d = ds.points.empty() ? 0 : ds.points.front().size();
    for (std::size_t j = 0; j < d; ++j) csv << (j ? "," : "") << "x_" << (j + 1);
    csv << ",true_label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) csv << (j ? "," : "") << format_full(ds.points[i][j]);
        csv << ',' << (ds.mode_labels[i] == 0 ? 'A' : 'B') << '\n';
    }
    return csv.str();
}

double measured_q(const std::vector<ClassifierOutput>& outputs) {
    return ratio_q(outputs).value_or(-1.0);
}

std::vector<ClassLabel> labels_of(const std::vector<ClassifierOutput>& outputs) {
    std::vector<ClassLabel> labels;
    labels.reserve(outputs.size());
    for (const auto& o : outputs) labels.push_back(o.label);
    return labels;
}

Series log_series(const RunLog& log, double StepRecord::*field, const std::string& name) {
    Series s;
    s.name = name;
    for (const StepRecord& r : log.steps) {
        s.x.push_back(static_cast<double>(r.step));
        s.y.push_back(r.*field);
    }
    return s;
}

void write_log_chart(const RunLog& log, double StepRecord::*field, const std::string& name,
                     const fs::path& path) {
    PlotSpec spec;
    spec.series.push_back(log_series(log, field, name));
    spec.title = name + " per outer step";
    spec.x_label = "outer step";
    spec.y_label = name;
    write_text_file(render_line_chart(spec), path.string());
}

int fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 1;
}

}  // namespace

std::string resolve_out_dir(const std::string& out) {
    if (!out.empty() && fs::path(out).is_absolute()) return out;
    if (const char* root = std::getenv("FAIRDIFF_OUT_ROOT"); root != nullptr && *root != '\0') {
        return (fs::path(root) / out).string();
    }
    return out;
}

int cmd_pretrain(const std::string& config_path, const std::string& out_dir, int threads) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (threads > 0) cfg.threads = threads;
        cfg.validate();
        const fs::path dir = make_run_dir(resolve_out_dir(out_dir), cfg.seed);
        write_text_file(run_config_to_json(cfg), (dir / "resolved_config.json").string());

        const MixtureSpec spec = cfg.mixture();
        const NoiseSchedule schedule = cfg.schedule();

        Rng data_rng(derive_seed(cfg.seed, kDatasetTag));
        const Dataset ds = sample_dataset(spec, static_cast<std::size_t>(cfg.dataset_size), data_rng);
        write_text_file(dataset_csv(ds), (dir / "dataset.csv").string());

        Rng train_rng(derive_seed(cfg.seed, kPretrainTag));
        const PretrainResult trained = pretrain(ds, schedule, cfg.pretrain_config(), train_rng);
        save_checkpoint(trained.params, (dir / "base.ckpt").string());

        std::ostringstream loss_csv;
        loss_csv << "step,mse\n";
        for (std::size_t i = 0; i < trained.loss_trace.size(); ++i) {
            loss_csv << i << ',' << format_full(trained.loss_trace[i]) << '\n';
        }
        write_text_file(loss_csv.str(), (dir / "pretrain_loss.csv").string());

        const auto terminals =
            collect_rollouts(trained.params, cfg.eval_samples, schedule,
                             derive_seed(cfg.seed, kEvalTag), 0, cfg.threads);
        std::vector<Vec> points;
        points.reserve(terminals.size());
        for (const auto& t : terminals) points.push_back(t.terminal());
        const auto outputs = classify_batch(points, spec, cfg.classifier_threshold);

        std::cout << "final_loss: " << trained.loss_trace.back() << "\n";
        std::cout << "base_q: " << measured_q(outputs) << "\n";
        std::cout << "checkpoint: " << (dir / "base.ckpt").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_finetune(const std::string& config_path, const std::string& ckpt_path,
                 const std::string& out_dir, int threads) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (threads > 0) cfg.threads = threads;
        cfg.validate();
        const DenoiserParams base = load_checkpoint(ckpt_path);
        const int d = static_cast<int>(cfg.mode_a_center.size());
        if (base.dim != d || base.hidden != cfg.hidden_width || base.embed != cfg.embed_width) {
            return fail("checkpoint shape (d=" + std::to_string(base.dim) +
                        ", hidden=" + std::to_string(base.hidden) +
                        ", embed=" + std::to_string(base.embed) + ") does not match config (d=" +
                        std::to_string(d) + ", hidden=" + std::to_string(cfg.hidden_width) +
                        ", embed=" + std::to_string(cfg.embed_width) + ")");
        }

        const fs::path dir = make_run_dir(resolve_out_dir(out_dir), cfg.seed);
        write_text_file(run_config_to_json(cfg), (dir / "resolved_config.json").string());

        const MixtureSpec spec = cfg.mixture();
        const NoiseSchedule schedule = cfg.schedule();
        const std::uint64_t eval_master = derive_seed(cfg.seed, kEvalTag);

        const int scatter_n = std::min(cfg.eval_samples, 1000);
        if (d == 2) {
            const auto before = sample_terminals(base, schedule, eval_master, scatter_n);
            const auto before_out = classify_batch(before, spec, cfg.classifier_threshold);
            write_text_file(render_scatter(before, labels_of(before_out), "samples before fine-tuning"),
                            (dir / "step_0_scatter.svg").string());
        }

        auto sink = [&dir](int step, const DenoiserParams& p) {
            save_checkpoint(p, (dir / ("ckpt_step_" + std::to_string(step) + ".bin")).string());
        };
        const FinetuneResult result = finetune(base, cfg.trainer_config(), spec, schedule, sink);

        write_runlog_csv(result.log, (dir / "runlog.csv").string());
        save_checkpoint(result.params, (dir / "final.ckpt").string());

        const int n_steps = static_cast<int>(result.log.steps.size());
        if (n_steps > 0) {
            const std::string k = std::to_string(n_steps);
            write_log_chart(result.log, &StepRecord::mean_reward, "mean reward",
                            dir / ("step_" + k + "_reward.svg"));
            write_log_chart(result.log, &StepRecord::loss, "loss", dir / ("step_" + k + "_loss.svg"));
            write_log_chart(result.log, &StepRecord::mean_kl, "mean KL", dir / ("step_" + k + "_kl.svg"));
            write_log_chart(result.log, &StepRecord::q_ratio, "ratio q", dir / ("step_" + k + "_q.svg"));
        }
        if (d == 2) {
            const auto after = sample_terminals(result.params, schedule, eval_master, scatter_n);
            const auto after_out = classify_batch(after, spec, cfg.classifier_threshold);
            write_text_file(render_scatter(after, labels_of(after_out), "samples after fine-tuning"),
                            (dir / ("step_" + std::to_string(n_steps) + "_scatter.svg")).string());
        }

        if (n_steps > 0) {
            const StepRecord& last = result.log.steps.back();
            std::cout << "final_q: " << last.q_ratio << "\n";
            std::cout << "final_mean_reward: " << last.mean_reward << "\n";
        } else {
            std::cout << "final_q: n/a\nfinal_mean_reward: n/a\n";
        }
        std::cout << "checkpoint: " << (dir / "final.ckpt").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_evaluate(const std::string& ckpt_path, int n, std::uint64_t seed,
                 const std::string& out_dir, const std::string& config_path, int threads) {
    try {
        if (n < 1) return fail("evaluate: n must be >= 1");
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        cfg.seed = seed;
        cfg.eval_samples = n;
        if (threads > 0) cfg.threads = threads;
        cfg.validate();

        const DenoiserParams params = load_checkpoint(ckpt_path);
        const int d = static_cast<int>(cfg.mode_a_center.size());
        if (params.dim != d) {
            return fail("checkpoint dimension " + std::to_string(params.dim) +
                        " does not match the mixture dimension " + std::to_string(d));
        }

        const fs::path dir = make_run_dir(resolve_out_dir(out_dir), seed);
        write_text_file(run_config_to_json(cfg), (dir / "resolved_config.json").string());

        const MixtureSpec spec = cfg.mixture();
        const NoiseSchedule schedule = cfg.schedule();
        const auto points = sample_terminals(params, schedule, derive_seed(seed, kEvalTag), n);
        const auto outputs = classify_batch(points, spec, cfg.classifier_threshold);
        write_text_file(classification_csv(points, outputs), (dir / "classification.csv").string());

        std::size_t count_a = 0, count_b = 0, count_none = 0;
        for (const auto& o : outputs) {
            if (o.label == ClassLabel::A) ++count_a;
            else if (o.label == ClassLabel::B) ++count_b;
            else ++count_none;
        }
        const auto q = ratio_q(outputs);

        auto mean_of = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        const double mean_shift_a = mean_of(reward_shift(outputs, ClassLabel::A));
        const double mean_shift_b = mean_of(reward_shift(outputs, ClassLabel::B));
        double mean_balance = 0.0;
        if (q.has_value()) mean_balance = mean_of(reward_balance(outputs).rewards);

        if (q.has_value()) std::cout << "q: " << *q << "\n";
        else std::cout << "q: undefined\n";
        std::cout << "count_a: " << count_a << "\ncount_b: " << count_b
                  << "\ncount_none: " << count_none << "\n";
        std::cout << "mean_shift_reward_A: " << mean_shift_a << "\n";
        std::cout << "mean_shift_reward_B: " << mean_shift_b << "\n";
        std::cout << "mean_balance_reward: " << mean_balance << "\n";
        std::cout << "report: " << (dir / "classification.csv").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

}  // namespace fairdiff
