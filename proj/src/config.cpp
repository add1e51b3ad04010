// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairdiff/errors.hpp"

namespace fairdiff {

using nlohmann::json;

MixtureSpec RunConfig::mixture() const {
    MixtureSpec spec;
    spec.mode_a_center = mode_a_center;
    spec.mode_b_center = mode_b_center;
    spec.mode_sigma = mode_sigma;
    spec.weight_a = weight_a;
    return spec;
}

NoiseSchedule RunConfig::schedule() const { return make_schedule(T, beta_min, beta_max); }

PretrainConfig RunConfig::pretrain_config() const {
    PretrainConfig c;
    c.steps = pretrain_steps;
    c.batch_size = pretrain_batch;
    c.learning_rate = pretrain_lr;
    c.hidden_width = hidden_width;
    c.embed_width = embed_width;
    return c;
}

TrainerConfig RunConfig::trainer_config() const {
    TrainerConfig c;
    c.variant = variant == "rollback" ? TrustRegion::Rollback : TrustRegion::Clip;
    c.clip_eps = clip_eps;
    c.kl_delta = kl_delta;
    c.rollback_coef = rollback_coef;
    c.inner_epochs = inner_epochs;
    c.batch_size = batch_size;
    c.learning_rate = learning_rate;
    c.max_outer_steps = max_outer_steps;
    c.reward_kind = reward_kind == "shift" ? RewardKind::Shift : RewardKind::Balance;
    if (underrepresented == "A") c.underrepresented = ClassLabel::A;
    if (underrepresented == "B") c.underrepresented = ClassLabel::B;
    c.balance_tolerance = balance_tolerance;
    c.classifier_threshold = classifier_threshold;
    c.master_seed = seed;
    c.checkpoint_every = checkpoint_every;
    c.threads = threads;
    return c;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw ConfigError("config key '" + key + "': " + why);
    };
    if (mode_a_center.empty()) fail("mode_a_center", "must be a non-empty array");
    if (mode_a_center.size() != mode_b_center.size()) {
        fail("mode_b_center", "must match the dimension of mode_a_center");
    }
    if (!(mode_sigma > 0.0)) fail("mode_sigma", "must be positive");
    if (!(weight_a > 0.0) || !(weight_a < 1.0)) fail("weight_a", "must lie in (0,1)");
    try {
        mixture().validate();
    } catch (const ConfigError& e) {
        fail("mode_a_center/mode_b_center", e.what());
    }
    if (T < 2) fail("T", "must be >= 2");
    if (!(beta_min > 0.0) || !(beta_max < 1.0) || beta_min > beta_max) {
        fail("beta_min/beta_max", "need 0 < beta_min <= beta_max < 1");
    }
    if (hidden_width < 1) fail("hidden_width", "must be >= 1");
    if (embed_width < 2 || embed_width % 2 != 0) fail("embed_width", "must be even and >= 2");
    if (dataset_size < 1) fail("dataset_size", "must be >= 1");
    if (pretrain_steps < 1) fail("pretrain_steps", "must be >= 1");
    if (pretrain_batch < 1) fail("pretrain_batch", "must be >= 1");
    if (!(pretrain_lr > 0.0)) fail("pretrain_lr", "must be positive");
    if (variant != "clip" && variant != "rollback") fail("variant", "must be 'clip' or 'rollback'");
    if (reward_kind != "shift" && reward_kind != "balance") {
        fail("reward_kind", "must be 'shift' or 'balance'");
    }
    if (underrepresented != "A" && underrepresented != "B" && underrepresented != "auto") {
        fail("underrepresented", "must be 'A', 'B' or 'auto'");
    }
    if (eval_samples < 1) fail("eval_samples", "must be >= 1");
    try {
        trainer_config().validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "mode_a_center") cfg.mode_a_center = value.get<std::vector<double>>();
            else if (key == "mode_b_center") cfg.mode_b_center = value.get<std::vector<double>>();
            else if (key == "mode_sigma") cfg.mode_sigma = value.get<double>();
            else if (key == "weight_a") cfg.weight_a = value.get<double>();
            else if (key == "T") cfg.T = value.get<int>();
            else if (key == "beta_min") cfg.beta_min = value.get<double>();
            else if (key == "beta_max") cfg.beta_max = value.get<double>();
            else if (key == "hidden_width") cfg.hidden_width = value.get<int>();
            else if (key == "embed_width") cfg.embed_width = value.get<int>();
            else if (key == "dataset_size") cfg.dataset_size = value.get<int>();
            else if (key == "pretrain_steps") cfg.pretrain_steps = value.get<int>();
            else if (key == "pretrain_batch") cfg.pretrain_batch = value.get<int>();
            else if (key == "pretrain_lr") cfg.pretrain_lr = value.get<double>();
            else if (key == "variant") cfg.variant = value.get<std::string>();
            else if (key == "clip_eps") cfg.clip_eps = value.get<double>();
            else if (key == "kl_delta") cfg.kl_delta = value.get<double>();
            else if (key == "rollback_coef") cfg.rollback_coef = value.get<double>();
            else if (key == "inner_epochs") cfg.inner_epochs = value.get<int>();
            else if (key == "batch_size") cfg.batch_size = value.get<int>();
            else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
            else if (key == "max_outer_steps") cfg.max_outer_steps = value.get<int>();
            else if (key == "reward_kind") cfg.reward_kind = value.get<std::string>();
            else if (key == "underrepresented") cfg.underrepresented = value.get<std::string>();
            else if (key == "balance_tolerance") cfg.balance_tolerance = value.get<double>();
            else if (key == "classifier_threshold") cfg.classifier_threshold = value.get<double>();
            else if (key == "checkpoint_every") cfg.checkpoint_every = value.get<int>();
            else if (key == "threads") cfg.threads = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "eval_samples") cfg.eval_samples = value.get<int>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& c) {
    json doc;
    doc["mode_a_center"] = c.mode_a_center;
    doc["mode_b_center"] = c.mode_b_center;
    doc["mode_sigma"] = c.mode_sigma;
    doc["weight_a"] = c.weight_a;
    doc["T"] = c.T;
    doc["beta_min"] = c.beta_min;
    doc["beta_max"] = c.beta_max;
    doc["hidden_width"] = c.hidden_width;
    doc["embed_width"] = c.embed_width;
    doc["dataset_size"] = c.dataset_size;
    doc["pretrain_steps"] = c.pretrain_steps;
    doc["pretrain_batch"] = c.pretrain_batch;
    doc["pretrain_lr"] = c.pretrain_lr;
    doc["variant"] = c.variant;
    doc["clip_eps"] = c.clip_eps;
    doc["kl_delta"] = c.kl_delta;
    doc["rollback_coef"] = c.rollback_coef;
    doc["inner_epochs"] = c.inner_epochs;
    doc["batch_size"] = c.batch_size;
    doc["learning_rate"] = c.learning_rate;
    doc["max_outer_steps"] = c.max_outer_steps;
    doc["reward_kind"] = c.reward_kind;
    doc["underrepresented"] = c.underrepresented;
    doc["balance_tolerance"] = c.balance_tolerance;
    doc["classifier_threshold"] = c.classifier_threshold;
    doc["checkpoint_every"] = c.checkpoint_every;
    doc["threads"] = c.threads;
    doc["seed"] = c.seed;
    doc["eval_samples"] = c.eval_samples;
    return doc.dump(2) + "\n";
}

}  // namespace fairdiff
