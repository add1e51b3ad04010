// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/denoiser.hpp"

#include <cmath>
#include <string>

#include "fairdiff/errors.hpp"

namespace fairdiff {

namespace {

void fill_gaussian(std::vector<double>& w, double stddev, Rng& rng) {
    for (double& v : w) v = stddev * rng.normal();
}

// y = W x + b, W is rows x cols row-major.
void affine(const std::vector<double>& w, const std::vector<double>& b, const double* x,
            int rows, int cols, double* y) {
    for (int r = 0; r < rows; ++r) {
        double acc = b[static_cast<std::size_t>(r)];
        const double* row = w.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

}  // namespace

DenoiserParams init_params(Rng& rng, int dim, int hidden, int embed) {
    if (dim < 1) throw ConfigError("init_params: dim must be >= 1");
    if (hidden < 1) throw ConfigError("init_params: hidden width must be >= 1");
    if (embed < 2 || embed % 2 != 0) throw ConfigError("init_params: embed width must be even and >= 2");

    DenoiserParams p;
    p.dim = dim;
    p.hidden = hidden;
    p.embed = embed;
    const int in = dim + embed;
    p.w1.resize(static_cast<std::size_t>(hidden) * in);
    p.b1.assign(static_cast<std::size_t>(hidden), 0.0);
    p.w2.resize(static_cast<std::size_t>(hidden) * hidden);
    p.b2.assign(static_cast<std::size_t>(hidden), 0.0);
    p.w3.resize(static_cast<std::size_t>(dim) * hidden);
    p.b3.assign(static_cast<std::size_t>(dim), 0.0);

    fill_gaussian(p.w1, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    fill_gaussian(p.w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
    fill_gaussian(p.w3, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
    return p;
}

std::vector<double> time_embedding(int t, int width) {
    if (width < 2 || width % 2 != 0) {
        throw ConfigError("time_embedding: width must be even and >= 2");
    }
    const int pairs = width / 2;
    std::vector<double> emb(static_cast<std::size_t>(width));
    for (int k = 0; k < pairs; ++k) {
        const double freq = std::pow(10000.0, -static_cast<double>(k) / pairs);
        emb[static_cast<std::size_t>(2 * k)] = std::sin(t * freq);
        emb[static_cast<std::size_t>(2 * k + 1)] = std::cos(t * freq);
    }
    return emb;
}

ForwardTrace forward_traced(const DenoiserParams& params, const Vec& x, int t) {
    if (static_cast<int>(x.size()) != params.dim) {
        throw ShapeError("forward: input has dimension " + std::to_string(x.size()) +
                         ", network expects " + std::to_string(params.dim));
    }
    ForwardTrace tr;
    tr.dim = params.dim;
    tr.hidden = params.hidden;
    tr.embed = params.embed;
    tr.t = t;

    tr.input.resize(static_cast<std::size_t>(params.dim + params.embed));
    for (int i = 0; i < params.dim; ++i) tr.input[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    const auto emb = time_embedding(t, params.embed);
    for (int i = 0; i < params.embed; ++i) tr.input[static_cast<std::size_t>(params.dim + i)] = emb[static_cast<std::size_t>(i)];

    const int H = params.hidden;
    tr.h1.resize(static_cast<std::size_t>(H));
    tr.h2.resize(static_cast<std::size_t>(H));
    tr.out.resize(static_cast<std::size_t>(params.dim));

    affine(params.w1, params.b1, tr.input.data(), H, params.dim + params.embed, tr.h1.data());
    for (double& v : tr.h1) v = std::tanh(v);
    affine(params.w2, params.b2, tr.h1.data(), H, H, tr.h2.data());
    for (double& v : tr.h2) v = std::tanh(v);
    affine(params.w3, params.b3, tr.h2.data(), params.dim, H, tr.out.data());
    return tr;
}

Vec forward(const DenoiserParams& params, const Vec& x, int t) {
    return forward_traced(params, x, t).out;
}

ParamGrad ParamGrad::zeros_like(const DenoiserParams& p) {
    ParamGrad g;
    g.dim = p.dim;
    g.hidden = p.hidden;
    g.embed = p.embed;
    g.w1.assign(p.w1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.w2.assign(p.w2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    g.w3.assign(p.w3.size(), 0.0);
    g.b3.assign(p.b3.size(), 0.0);
    return g;
}

void ParamGrad::add(const ParamGrad& other) {
    auto axpy = [](std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    if (dim != other.dim || hidden != other.hidden || embed != other.embed) {
        throw ShapeError("ParamGrad::add: shape mismatch");
    }
    axpy(w1, other.w1);
    axpy(b1, other.b1);
    axpy(w2, other.w2);
    axpy(b2, other.b2);
    axpy(w3, other.w3);
    axpy(b3, other.b3);
}

void ParamGrad::scale(double s) {
    for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3}) {
        for (double& x : *v) x *= s;
    }
}

bool ParamGrad::all_finite() const {
    for (const auto* v : {&w1, &b1, &w2, &b2, &w3, &b3}) {
        for (double x : *v) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

void backward_into(const DenoiserParams& params, const ForwardTrace& trace, const Vec& d_out,
                   ParamGrad& grad) {
    if (trace.dim != params.dim || trace.hidden != params.hidden || trace.embed != params.embed) {
        throw ShapeError("backward: trace was recorded for a different network shape");
    }
    if (grad.dim != params.dim || grad.hidden != params.hidden || grad.embed != params.embed) {
        throw ShapeError("backward: gradient accumulator has a different network shape");
    }
    if (static_cast<int>(d_out.size()) != params.dim) {
        throw ShapeError("backward: output cotangent has wrong dimension");
    }

    const int H = params.hidden;
    const int d = params.dim;
    const int in = d + params.embed;

    // Output layer.
    std::vector<double> dh2(static_cast<std::size_t>(H), 0.0);
    for (int r = 0; r < d; ++r) {
        const double g = d_out[static_cast<std::size_t>(r)];
        grad.b3[static_cast<std::size_t>(r)] += g;
        double* wrow = grad.w3.data() + static_cast<std::size_t>(r) * H;
        const double* prow = params.w3.data() + static_cast<std::size_t>(r) * H;
        for (int c = 0; c < H; ++c) {
            wrow[c] += g * trace.h2[static_cast<std::size_t>(c)];
            dh2[static_cast<std::size_t>(c)] += g * prow[c];
        }
    }

    // Hidden layer, tanh' = 1 - a^2.
    std::vector<double> dh1(static_cast<std::size_t>(H), 0.0);
    for (int r = 0; r < H; ++r) {
        const double a = trace.h2[static_cast<std::size_t>(r)];
        const double g = dh2[static_cast<std::size_t>(r)] * (1.0 - a * a);
        grad.b2[static_cast<std::size_t>(r)] += g;
        double* wrow = grad.w2.data() + static_cast<std::size_t>(r) * H;
        const double* prow = params.w2.data() + static_cast<std::size_t>(r) * H;
        for (int c = 0; c < H; ++c) {
            wrow[c] += g * trace.h1[static_cast<std::size_t>(c)];
            dh1[static_cast<std::size_t>(c)] += g * prow[c];
        }
    }

    // Input layer.
    for (int r = 0; r < H; ++r) {
        const double a = trace.h1[static_cast<std::size_t>(r)];
        const double g = dh1[static_cast<std::size_t>(r)] * (1.0 - a * a);
        grad.b1[static_cast<std::size_t>(r)] += g;
        double* wrow = grad.w1.data() + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) {
            wrow[c] += g * trace.input[static_cast<std::size_t>(c)];
        }
    }
}

ParamGrad backward(const DenoiserParams& params, const ForwardTrace& trace, const Vec& d_out) {
    ParamGrad g = ParamGrad::zeros_like(params);
    backward_into(params, trace, d_out, g);
    return g;
}

void apply_gradient(DenoiserParams& params, const ParamGrad& grad, double lr) {
    if (grad.dim != params.dim || grad.hidden != params.hidden || grad.embed != params.embed) {
        throw ShapeError("apply_gradient: shape mismatch");
    }
    auto step = [lr](std::vector<double>& p, const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
    };
    step(params.w1, grad.w1);
    step(params.b1, grad.b1);
    step(params.w2, grad.w2);
    step(params.b2, grad.b2);
    step(params.w3, grad.w3);
    step(params.b3, grad.b3);
}

namespace {
template <typename Block>
auto& block_at(Block& b, std::size_t i) {
    std::vector<double>* blocks[] = {&b.w1, &b.b1, &b.w2, &b.b2, &b.w3, &b.b3};
    for (auto* v : blocks) {
        if (i < v->size()) return (*v)[i];
        i -= v->size();
    }
    throw ShapeError("parameter index out of range");
}
}  // namespace

double& param_at(DenoiserParams& params, std::size_t i) { return block_at(params, i); }

double grad_at(const ParamGrad& grad, std::size_t i) {
    const std::vector<double>* blocks[] = {&grad.w1, &grad.b1, &grad.w2,
                                           &grad.b2, &grad.w3, &grad.b3};
    for (const auto* v : blocks) {
        if (i < v->size()) return (*v)[i];
        i -= v->size();
    }
    throw ShapeError("gradient index out of range");
}

}  // namespace fairdiff
