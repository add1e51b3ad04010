// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails. Run with no arguments
// for the full suite or pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairdiff/checkpoint.hpp"
#include "fairdiff/classifier.hpp"
#include "fairdiff/metrics.hpp"
#include "fairdiff/pretrain.hpp"
#include "fairdiff/trainer.hpp"
#include "oracles.hpp"

using namespace fairdiff;

namespace {

constexpr std::uint64_t kSeed = 1001;

// Base-model training setup shared by the end-to-end criteria.
NoiseSchedule accept_schedule() { return make_schedule(50, 0.002, 0.3); }

PretrainConfig accept_pretrain_config() {
    PretrainConfig cfg;
    cfg.steps = 20000;
    cfg.batch_size = 128;
    cfg.learning_rate = 0.02;
    cfg.hidden_width = 64;
    cfg.embed_width = 8;
    return cfg;
}

TrainerConfig shift_config() {
    TrainerConfig cfg;
    cfg.variant = TrustRegion::Clip;
    cfg.reward_kind = RewardKind::Shift;
    cfg.underrepresented = ClassLabel::A;
    cfg.inner_epochs = 4;
    cfg.batch_size = 64;
    cfg.learning_rate = 1e-2;
    cfg.max_outer_steps = 50;
    cfg.master_seed = derive_seed(kSeed, 0x73686966);  // "shif"
    return cfg;
}

TrainerConfig balance_config() {
    TrainerConfig cfg;
    cfg.variant = TrustRegion::Clip;
    cfg.reward_kind = RewardKind::Balance;
    cfg.inner_epochs = 4;
    cfg.batch_size = 256;
    cfg.learning_rate = 3e-3;
    cfg.max_outer_steps = 100;
    cfg.balance_tolerance = 0.05;
    cfg.master_seed = derive_seed(kSeed, 0x62616c61);  // "bala"
    cfg.checkpoint_every = 1000000;  // no periodic sinks during acceptance
    return cfg;
}

// Shared lazily-built artifacts so criteria stay independently runnable.
struct Shared {
    NoiseSchedule schedule = accept_schedule();
    MixtureSpec spec = default_mixture();
    std::optional<DenoiserParams> base;
    std::optional<FinetuneResult> balance;

    const DenoiserParams& base_params() {
        if (!base) {
            Rng data_rng(derive_seed(kSeed, 0x64617461));
            const Dataset ds = sample_dataset(spec, 8192, data_rng);
            Rng train_rng(derive_seed(kSeed, 0x70726574));
            base = pretrain(ds, schedule, accept_pretrain_config(), train_rng).params;
        }
        return *base;
    }
    const FinetuneResult& balance_run() {
        if (!balance) balance = finetune(base_params(), balance_config(), spec, schedule);
        return *balance;
    }
};
Shared shared;

std::vector<Vec> sample_points(const DenoiserParams& params, const NoiseSchedule& s,
                               std::uint64_t master, int n) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(master, 0, static_cast<std::uint64_t>(i)));
        pts.push_back(sample_trajectory(params, s, rng).terminal());
    }
    return pts;
}

double measure_q(const DenoiserParams& params, const NoiseSchedule& s, std::uint64_t master,
                 int n, const MixtureSpec& spec) {
    const auto batch = collect_rollouts(params, n, s, master, 0);
    std::vector<Vec> pts;
    pts.reserve(batch.size());
    for (const auto& traj : batch) pts.push_back(traj.terminal());
    const auto q = ratio_q(classify_batch(pts, spec, 0.7));
    return q.value_or(-1.0);
}

struct Failure {
    std::string detail;
};

#define REQUIRE_OR_FAIL(cond, msg)                              \
    do {                                                        \
        if (!(cond)) throw Failure{std::string(msg)};           \
    } while (0)

ClassifierOutput synth_output(ClassLabel label, double p_a) { return ClassifierOutput{p_a, label}; }

std::vector<ClassifierOutput> synth_batch(int a, int b, int none) {
    std::vector<ClassifierOutput> batch;
    for (int i = 0; i < a; ++i) batch.push_back(synth_output(ClassLabel::A, 0.95));
    for (int i = 0; i < b; ++i) batch.push_back(synth_output(ClassLabel::B, 0.05));
    for (int i = 0; i < none; ++i) batch.push_back(synth_output(ClassLabel::None, 0.5));
    return batch;
}

// ---- criterion 1: reward unit suite ---------------------------------------

void criterion_reward_units() {
    REQUIRE_OR_FAIL(*ratio_q(synth_batch(8, 8, 0)) == 0.5, "8A/8B must give q = 0.5 exactly");
    REQUIRE_OR_FAIL(*ratio_q(synth_batch(0, 16, 0)) == 0.0, "0A/16B must give q = 0");
    REQUIRE_OR_FAIL(*ratio_q(synth_batch(3, 13, 4)) == 0.1875, "3A/13B/4None must give q = 0.1875");
    REQUIRE_OR_FAIL(!ratio_q(synth_batch(0, 0, 6)).has_value(), "all-None q must be undefined");

    const auto balanced = reward_balance(synth_batch(8, 8, 0));
    for (double r : balanced.rewards) {
        REQUIRE_OR_FAIL(r == 0.0, "q = 0.5 must zero every reward exactly");
    }

    const auto quarter = reward_balance(synth_batch(4, 12, 0));
    REQUIRE_OR_FAIL(*quarter.q == 0.25, "4A/12B must give q = 0.25");
    for (int i = 0; i < 4; ++i) {
        REQUIRE_OR_FAIL(quarter.rewards[static_cast<std::size_t>(i)] == 0.25, "minority reward must be +0.25");
    }
    for (int i = 4; i < 16; ++i) {
        REQUIRE_OR_FAIL(quarter.rewards[static_cast<std::size_t>(i)] == -0.25, "majority reward must be -0.25");
    }

    const auto eighth = reward_balance(synth_batch(2, 14, 0));
    double mean = 0.0;
    for (double r : eighth.rewards) mean += r;
    mean /= 16.0;
    REQUIRE_OR_FAIL(mean == -0.28125, "q = 0.125 classified mean must be -0.28125 exactly");

    const auto with_none = reward_balance(synth_batch(4, 12, 5));
    for (int i = 16; i < 21; ++i) {
        REQUIRE_OR_FAIL(with_none.rewards[static_cast<std::size_t>(i)] == 0.0, "None reward must be 0");
    }

    bool threw = false;
    try {
        reward_balance(synth_batch(0, 0, 3));
    } catch (const UndefinedRatioError&) {
        threw = true;
    }
    REQUIRE_OR_FAIL(threw, "all-None balance reward must raise the undefined-ratio error");

    const auto outputs = synth_batch(1, 1, 1);
    const auto shift_a = reward_shift(outputs, ClassLabel::A);
    REQUIRE_OR_FAIL(shift_a[0] == 0.95 && shift_a[1] == 0.05 && shift_a[2] == 0.5,
                    "shift reward must read the class-A probability");
}

// ---- criterion 2: total-reward shape by enumeration ------------------------

void criterion_reward_shape() {
    for (int f = 0; f <= 32; ++f) {
        for (int m = 0; f + m <= 32; ++m) {
            if (f + m == 0) continue;
            const auto rb = reward_balance(synth_batch(f, m, (f + 3 * m) % 4));
            const double q = static_cast<double>(f) / (f + m);
            double total = 0.0;
            for (double r : rb.rewards) total += r;

            const double want = -(f + m) * std::abs(2.0 * q - 1.0) * std::abs(q - 0.5);
            REQUIRE_OR_FAIL(std::abs(total - want) <= 1e-12, "total reward formula violated");
            REQUIRE_OR_FAIL(total <= 0.0, "total reward must never be positive");
            if (f == m) {
                REQUIRE_OR_FAIL(total == 0.0, "balance must be the exact maximum");
            } else {
                REQUIRE_OR_FAIL(total < 0.0, "maximum must be unique at q = 0.5");
            }
            const double dev = std::abs(q - 0.5);
            REQUIRE_OR_FAIL(std::abs(total / (f + m) - (-2.0 * dev * dev)) <= 1e-12,
                            "classified mean must equal -2(0.5-q)^2");
        }
    }
}

// ---- criterion 3: gradient correctness -------------------------------------

void criterion_gradients() {
    const auto s = make_schedule(6, 0.02, 0.3);
    Rng rng(derive_seed(kSeed, 3));
    auto params = init_params(rng, 2, 6, 4);

    // Pretraining MSE on a fixed batch, finite differences against the
    // independent network evaluation.
    {
        struct Sample {
            Vec x_t;
            int t;
            Vec noise;
        };
        std::vector<Sample> batch;
        Rng data(derive_seed(kSeed, 4));
        for (int i = 0; i < 16; ++i) {
            const Vec x0 = data.normal_vec(2);
            const int t = 1 + static_cast<int>(data.next_u64() % 6);
            const Vec noise = data.normal_vec(2);
            batch.push_back({forward_diffuse(x0, t, noise, s), t, noise});
        }
        const double denom = 16.0 * 2.0;

        ParamGrad grad = ParamGrad::zeros_like(params);
        for (const auto& sample : batch) {
            const auto trace = forward_traced(params, sample.x_t, sample.t);
            Vec d_out(2);
            for (int j = 0; j < 2; ++j) {
                d_out[static_cast<std::size_t>(j)] =
                    2.0 * (trace.out[static_cast<std::size_t>(j)] - sample.noise[static_cast<std::size_t>(j)]) / denom;
            }
            backward_into(params, trace, d_out, grad);
        }

        auto mse_loss = [&](const DenoiserParams& p) {
            oracle::TinyMlp net{p.dim, p.hidden, p.embed, p.w1, p.b1, p.w2, p.b2, p.w3, p.b3};
            double loss = 0.0;
            for (const auto& sample : batch) {
                const auto out = net.eval(sample.x_t, sample.t);
                for (int j = 0; j < 2; ++j) {
                    const double r = out[static_cast<std::size_t>(j)] - sample.noise[static_cast<std::size_t>(j)];
                    loss += r * r / denom;
                }
            }
            return loss;
        };

        const double h = 1e-5;
        Rng pick(derive_seed(kSeed, 5));
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t i = pick.next_u64() % params.count();
            double& slot = param_at(params, i);
            const double saved = slot;
            slot = saved + h;
            const double up = mse_loss(params);
            slot = saved - h;
            const double dn = mse_loss(params);
            slot = saved;
            const double fd = (up - dn) / (2.0 * h);
            const double an = grad_at(grad, i);
            const double scale = std::max({std::abs(an), std::abs(fd), 1e-8});
            REQUIRE_OR_FAIL(std::abs(an - fd) / scale < 1e-4, "MSE gradient mismatch at coordinate " + std::to_string(i));
        }
    }

    // PPO clipped-surrogate loss, same treatment.
    {
        const auto batch = collect_rollouts(params, 4, s, derive_seed(kSeed, 6), 0);
        const auto adv = compute_advantages({0.15, 0.85, 0.4, 0.6});
        TrainerConfig cfg;
        cfg.variant = TrustRegion::Clip;
        cfg.inner_epochs = 1;
        cfg.batch_size = 4;

        Rng perturb(derive_seed(kSeed, 7));
        for (std::size_t i = 0; i < params.count(); ++i) param_at(params, i) += 1e-3 * perturb.normal();

        const auto pass = surrogate_pass(params, batch, adv, cfg, s);

        auto surrogate_loss = [&](const DenoiserParams& p) {
            oracle::TinyMlp net{p.dim, p.hidden, p.embed, p.w1, p.b1, p.w2, p.b2, p.w3, p.b3};
            double total = 0.0;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                for (int k = 0; k < s.T; ++k) {
                    const int t = s.T - k;
                    const std::size_t ti = static_cast<std::size_t>(t);
                    const auto& x_t = batch[i].states[static_cast<std::size_t>(k)];
                    const auto& x_prev = batch[i].states[static_cast<std::size_t>(k) + 1];
                    const auto eps = net.eval(x_t, t);
                    Vec mu(2);
                    for (int j = 0; j < 2; ++j) {
                        mu[static_cast<std::size_t>(j)] =
                            (x_t[static_cast<std::size_t>(j)] -
                             s.betas[ti] / std::sqrt(1.0 - s.alpha_bars[ti]) * eps[static_cast<std::size_t>(j)]) /
                            std::sqrt(s.alphas[ti]);
                    }
                    const double logp = oracle::log_normal(x_prev, mu, s.sigmas[ti]);
                    const double ratio = std::exp(logp - batch[i].log_probs[static_cast<std::size_t>(k)]);
                    const double a = adv.advantages[i];
                    const double clipped = std::clamp(ratio, 0.8, 1.2) * a;
                    total += std::min(ratio * a, clipped);
                }
            }
            return -total / (4.0 * s.T);
        };

        const double h = 1e-5;
        Rng pick(derive_seed(kSeed, 8));
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t i = pick.next_u64() % params.count();
            double& slot = param_at(params, i);
            const double saved = slot;
            slot = saved + h;
            const double up = surrogate_loss(params);
            slot = saved - h;
            const double dn = surrogate_loss(params);
            slot = saved;
            const double fd = (up - dn) / (2.0 * h);
            const double an = grad_at(pass.grad, i);
            const double scale = std::max({std::abs(an), std::abs(fd), 1e-8});
            REQUIRE_OR_FAIL(std::abs(an - fd) / scale < 1e-4,
                            "surrogate gradient mismatch at coordinate " + std::to_string(i));
        }
    }
}

// ---- criterion 4: KL exactness ----------------------------------------------

void criterion_kl_exactness() {
    Rng rng(derive_seed(kSeed, 9));
    for (int pair = 0; pair < 20; ++pair) {
        const std::size_t d = 1 + rng.next_u64() % 3;
        const Vec mu_new = rng.normal_vec(d);
        Vec mu_old = rng.normal_vec(d);
        const double sigma = 0.2 + rng.uniform();

        const int n = 1000000;
        double sum = 0.0, sum_sq = 0.0;
        Rng mc(derive_seed(kSeed, 10, static_cast<std::uint64_t>(pair)));
        for (int i = 0; i < n; ++i) {
            Vec x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = mu_new[j] + sigma * mc.normal();
            const double diff =
                oracle::log_normal(x, mu_new, sigma) - oracle::log_normal(x, mu_old, sigma);
            sum += diff;
            sum_sq += diff * diff;
        }
        const double est = sum / n;
        const double se = std::sqrt((sum_sq / n - est * est) / n);
        const double exact = step_kl(mu_new, mu_old, sigma);
        REQUIRE_OR_FAIL(std::abs(exact - est) <= 3.0 * se,
                        "KL outside 3 standard errors on pair " + std::to_string(pair) +
                            " (exact " + std::to_string(exact) + ", MC " + std::to_string(est) +
                            " +- " + std::to_string(se) + ")");
    }
}

// ---- criterion 5: bias inheritance ------------------------------------------

void criterion_bias_inheritance() {
    const double q = measure_q(shared.base_params(), shared.schedule,
                               derive_seed(kSeed, 0x6576616c), 1000, shared.spec);
    REQUIRE_OR_FAIL(q >= 0.05 && q <= 0.15,
                    "base-model ratio " + std::to_string(q) + " outside [0.05, 0.15]");
}

// ---- criterion 6: shift experiment ------------------------------------------

void criterion_shift() {
    const auto result = finetune(shared.base_params(), shift_config(), shared.spec, shared.schedule);
    double best = -1.0;
    for (const auto& rec : result.log.steps) best = std::max(best, rec.mean_reward);
    REQUIRE_OR_FAIL(best > 0.9, "mean shift reward peaked at " + std::to_string(best) +
                                    " within " + std::to_string(result.log.steps.size()) + " steps");
}

// ---- criterion 7: balance experiment ----------------------------------------

void criterion_balance() {
    const auto& result = shared.balance_run();
    REQUIRE_OR_FAIL(result.log.steps.size() >= 10, "balance run logged fewer than 10 steps");
    REQUIRE_OR_FAIL(result.log.steps.size() <= 100, "balance run exceeded 100 steps");
    for (std::size_t i = result.log.steps.size() - 10; i < result.log.steps.size(); ++i) {
        const double q = result.log.steps[i].q_ratio;
        REQUIRE_OR_FAIL(std::abs(q - 0.5) < 0.1,
                        "step " + std::to_string(result.log.steps[i].step) + " has q " +
                            std::to_string(q) + " outside 0.5 +- 0.1");
    }
}

// ---- criterion 8: quality preservation ---------------------------------------

void criterion_quality() {
    const auto& result = shared.balance_run();
    const auto pts = sample_points(result.params, shared.schedule,
                                   derive_seed(kSeed, 0x7175616c), 1000);
    const double radius = 3.0 * shared.spec.mode_sigma;
    int inside = 0;
    for (const auto& p : pts) {
        const double da = std::sqrt(dist2(p, shared.spec.mode_a_center));
        const double db = std::sqrt(dist2(p, shared.spec.mode_b_center));
        if (std::min(da, db) <= radius) ++inside;
    }
    REQUIRE_OR_FAIL(inside >= 950, "only " + std::to_string(inside) +
                                       "/1000 samples within 3 sigma of a mode center");
}

// ---- criterion 9: trust-region properties -------------------------------------

void criterion_trust_region() {
    Rng rng(derive_seed(kSeed, 11));
    const double h = 1e-7;

    for (int i = 0; i < 200; ++i) {
        const double eps = 0.05 + 0.5 * rng.uniform();
        const double a = rng.normal();
        const double ratio = 0.05 + 2.5 * rng.uniform();
        REQUIRE_OR_FAIL(surrogate_clip(1.0, a, eps) == a, "clip identity at ratio 1");
        REQUIRE_OR_FAIL(surrogate_rollback(1.0, a, 0.0, 0.1, 2.0) == a, "rollback identity at kl 0");
        if (std::abs(std::abs(ratio - 1.0) - eps) < 10 * h) continue;
        const double fd =
            (surrogate_clip(ratio + h, a, eps) - surrogate_clip(ratio - h, a, eps)) / (2.0 * h);
        const bool deadzone = (a > 0.0 && ratio > 1.0 + eps) || (a < 0.0 && ratio < 1.0 - eps);
        if (deadzone) {
            REQUIRE_OR_FAIL(std::abs(fd) < 1e-6, "clip deadzone must have zero slope");
        } else {
            REQUIRE_OR_FAIL(std::abs(fd - a) < 1e-5 * std::max(1.0, std::abs(a)),
                            "clip slope must equal the advantage inside the band");
        }

        const double delta = 0.05 + rng.uniform();
        const double coef = 0.5 + 4.0 * rng.uniform();
        const double kl = 2.0 * delta * rng.uniform();
        if (std::abs(kl - delta) < 10 * h) continue;
        const double fdk = (surrogate_rollback(ratio, a, kl + h, delta, coef) -
                            surrogate_rollback(ratio, a, kl - h, delta, coef)) /
                           (2.0 * h);
        const double want = kl < delta ? 0.0 : -coef;
        REQUIRE_OR_FAIL(std::abs(fdk - want) < 1e-5 * std::max(1.0, coef),
                        "rollback hinge slope must be 0 before the trigger and -coef after");
    }

    // A rollback-variant run on the real pipeline completes with finite
    // losses and a logged KL series.
    TrainerConfig cfg = balance_config();
    cfg.variant = TrustRegion::Rollback;
    cfg.batch_size = 64;
    cfg.max_outer_steps = 10;
    cfg.balance_tolerance = 0.0;
    cfg.master_seed = derive_seed(kSeed, 0x726f6c6c);  // "roll"
    const auto result = finetune(shared.base_params(), cfg, shared.spec, shared.schedule);
    REQUIRE_OR_FAIL(result.log.steps.size() == 10, "rollback run must complete all steps");
    for (const auto& rec : result.log.steps) {
        REQUIRE_OR_FAIL(std::isfinite(rec.loss), "rollback loss must stay finite");
        REQUIRE_OR_FAIL(std::isfinite(rec.mean_kl), "rollback KL must stay finite");
    }
    bool any_kl = false;
    for (const auto& rec : result.log.steps) any_kl |= rec.mean_kl > 0.0;
    REQUIRE_OR_FAIL(any_kl, "rollback run must log a nonzero KL series");
}

// ---- criterion 10: determinism -------------------------------------------------

std::string strip_wall_ms(const std::string& csv) {
    // wall_ms is the one nondeterministic column; drop the last field of
    // every row before comparing.
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
    }
    return out.str();
}

void criterion_determinism() {
    TrainerConfig cfg = balance_config();
    cfg.batch_size = 64;
    cfg.max_outer_steps = 8;
    cfg.balance_tolerance = 0.0;
    cfg.master_seed = derive_seed(kSeed, 0x64657465);  // "dete"
    cfg.threads = 1;

    const auto a = finetune(shared.base_params(), cfg, shared.spec, shared.schedule);
    const auto b = finetune(shared.base_params(), cfg, shared.spec, shared.schedule);

    REQUIRE_OR_FAIL(strip_wall_ms(runlog_to_csv(a.log)) == strip_wall_ms(runlog_to_csv(b.log)),
                    "run logs differ between identical runs");

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fairdiff_acceptance_determinism";
    fs::create_directories(dir);
    save_checkpoint(a.params, (dir / "a.ckpt").string());
    save_checkpoint(b.params, (dir / "b.ckpt").string());
    std::ifstream fa(dir / "a.ckpt", std::ios::binary), fb(dir / "b.ckpt", std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    fs::remove_all(dir);
    REQUIRE_OR_FAIL(sa.str() == sb.str(), "checkpoints differ between identical runs");
}

// ---- harness -------------------------------------------------------------------

struct Criterion {
    int number;
    const char* name;
    std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "reward unit suite", criterion_reward_units},
        {2, "total-reward shape by enumeration", criterion_reward_shape},
        {3, "gradient correctness vs finite differences", criterion_gradients},
        {4, "exact KL vs Monte-Carlo estimate", criterion_kl_exactness},
        {5, "bias inheritance of the pretrained base", criterion_bias_inheritance},
        {6, "shift experiment reaches mean reward 0.9", criterion_shift},
        {7, "balance experiment reaches and holds q near 0.5", criterion_balance},
        {8, "quality preservation after balancing", criterion_quality},
        {9, "trust-region properties and rollback run", criterion_trust_region},
        {10, "byte-identical reruns", criterion_determinism},
    };

    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.number) == wanted.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            c.run();
        } catch (const Failure& f) {
            ok = false;
            detail = f.detail;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.name
                  << " (" << secs << " s)";
        if (!ok) std::cout << " -- " << detail;
        std::cout << "\n";
        failures += ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
