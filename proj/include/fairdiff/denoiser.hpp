// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "fairdiff/rng.hpp"
#include "fairdiff/vec.hpp"

namespace fairdiff {

/// Weights of the noise-prediction MLP, the trainable policy parameters.
///
/// Layout: input layer (dim + embed -> hidden), one hidden layer
/// (hidden -> hidden), output layer (hidden -> dim), tanh between layers.
/// Matrices are row-major.
struct DenoiserParams {
    int dim = 0;     // sample dimension d
    int hidden = 0;  // hidden width H
    int embed = 0;   // sinusoidal timestep-embedding width, even

    std::vector<double> w1, b1;  // H x (d+E), H
    std::vector<double> w2, b2;  // H x H,     H
    std::vector<double> w3, b3;  // d x H,     d

    std::size_t count() const {
        return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
    }
    bool shape_matches(const DenoiserParams& o) const {
        return dim == o.dim && hidden == o.hidden && embed == o.embed;
    }
};

/// Gradient of a scalar objective with respect to every parameter.
struct ParamGrad {
    int dim = 0, hidden = 0, embed = 0;
    std::vector<double> w1, b1, w2, b2, w3, b3;

    static ParamGrad zeros_like(const DenoiserParams& p);
    void add(const ParamGrad& other);
    void scale(double s);
    bool all_finite() const;
    std::size_t count() const {
        return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
    }
};

/// Activations recorded by one forward evaluation, consumed by backward().
struct ForwardTrace {
    int dim = 0, hidden = 0, embed = 0;
    int t = 0;
    std::vector<double> input;  // x concatenated with the timestep embedding
    std::vector<double> h1;     // tanh outputs of layer 1
    std::vector<double> h2;     // tanh outputs of layer 2
    Vec out;                    // linear network output, size dim
};

/// Fresh parameters: weights ~ N(0, 1/fan_in), biases zero.
DenoiserParams init_params(Rng& rng, int dim, int hidden, int embed = 8);

/// Sinusoidal features of the step index: pairs sin(t w_k), cos(t w_k) with
/// geometrically spaced frequencies. width must be even and >= 2.
std::vector<double> time_embedding(int t, int width);

/// Evaluate the network at (x, t).
Vec forward(const DenoiserParams& params, const Vec& x, int t);

/// Evaluate and keep the activations needed for a backward pass.
ForwardTrace forward_traced(const DenoiserParams& params, const Vec& x, int t);

/// Exact reverse-mode gradient: given d(objective)/d(out) for the traced
/// evaluation, accumulate d(objective)/d(theta) into grad.
/// Throws ShapeError if trace and params disagree on shapes.
void backward_into(const DenoiserParams& params, const ForwardTrace& trace,
                   const Vec& d_out, ParamGrad& grad);

/// Convenience wrapper returning a fresh gradient.
ParamGrad backward(const DenoiserParams& params, const ForwardTrace& trace, const Vec& d_out);

/// theta -= lr * grad. Throws ShapeError on shape mismatch.
void apply_gradient(DenoiserParams& params, const ParamGrad& grad, double lr);

/// Flat read/write access to parameter i, ordering w1,b1,w2,b2,w3,b3.
/// Used for coordinate-wise gradient checks.
double& param_at(DenoiserParams& params, std::size_t i);
double grad_at(const ParamGrad& grad, std::size_t i);

}  // namespace fairdiff
