#pragma once

#include <span>
#include <string>
#include <vector>

#include "qspirl/rng.hpp"

namespace qspirl {

using Vec = std::vector<double>;

enum class Activation { relu, tanh, sigmoid, identity };

Activation activation_from_name(const std::string &name);
const char *activation_name(Activation a);

double apply_activation(Activation a, double x);
double activation_grad(Activation a, double pre); // derivative at pre-activation

/// Fully connected layer, weights row-major out x in. Gradients accumulate
/// into gw/gb until zero_grad().
struct DenseLayer {
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
    Vec w, b;
    Vec gw, gb;

    DenseLayer() = default;
    DenseLayer(int in_dim, int out_dim, Activation a);

    /// Uniform Glorot, scaled by gain. Layers feeding LIF populations need
    /// gain > 1 to drive the membrane past threshold at initialization.
    void init_xavier(Rng &rng, double gain = 1.0);
    void zero_grad();
    int param_count() const { return out * in + out; }

    Vec affine(const Vec &x) const;                    // W x + b
    Vec activate(const Vec &pre) const;                // element-wise activation
    /// Accumulates parameter gradients for d(loss)/d(pre) and returns
    /// d(loss)/d(input).
    Vec backward_pre(const Vec &x, const Vec &gpre);
};

/// Tape for a plain feed-forward stack: inputs and pre-activations per layer.
struct StackTape {
    std::vector<Vec> inputs;
    std::vector<Vec> pre;
};

Vec stack_forward(std::vector<DenseLayer> &layers, const Vec &x, StackTape *tape);
/// Reverse pass over a stack_forward tape; accumulates layer gradients and
/// returns the gradient with respect to the stack input.
Vec stack_backward(std::vector<DenseLayer> &layers, const StackTape &tape, const Vec &gout);

/// Adam with bias correction and global-norm gradient clipping. Moment
/// buffers mirror the concatenated parameter blocks.
struct AdamState {
    double lr = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 1.0; // <= 0 disables clipping

    Vec m, v;
    long step = 0;
};

/// Scales all blocks so their joint L2 norm is at most max_norm.
/// Returns the pre-clip norm. Throws TrainingError on non-finite gradients.
double clip_global_norm(const std::vector<std::span<double>> &grads, double max_norm);

void adam_step(const std::vector<std::span<double>> &params,
               const std::vector<std::span<double>> &grads, AdamState &state);

} // namespace qspirl
