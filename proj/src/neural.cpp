#include "qspirl/neural.hpp"

#include <cmath>

#include "qspirl/errors.hpp"

namespace qspirl {

Activation activation_from_name(const std::string &name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw UsageError("unknown activation: " + name);
}

const char *activation_name(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
    }
    return "?";
}

double apply_activation(Activation a, double x) {
    switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::identity: return x;
    }
    return x;
}

double activation_grad(Activation a, double pre) {
    switch (a) {
    case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
        const double t = std::tanh(pre);
        return 1.0 - t * t;
    }
    case Activation::sigmoid: {
        const double s = 1.0 / (1.0 + std::exp(-pre));
        return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
    }
    return 1.0;
}

DenseLayer::DenseLayer(int in_dim, int out_dim, Activation a)
    : in(in_dim), out(out_dim), act(a), w(static_cast<std::size_t>(in_dim) * out_dim, 0.0),
      b(out_dim, 0.0), gw(w.size(), 0.0), gb(out_dim, 0.0) {}

void DenseLayer::init_xavier(Rng &rng, double gain) {
    const double limit = gain * std::sqrt(6.0 / (in + out));
    for (auto &v : w) v = rng.uniform(-limit, limit);
    for (auto &v : b) v = 0.0;
}

void DenseLayer::zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
}

Vec DenseLayer::affine(const Vec &x) const {
    if (static_cast<int>(x.size()) != in) throw UsageError("dense layer input shape mismatch");
    Vec y(out);
    for (int r = 0; r < out; ++r) {
        double acc = b[r];
        const double *row = &w[static_cast<std::size_t>(r) * in];
        for (int c = 0; c < in; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

Vec DenseLayer::activate(const Vec &pre) const {
    Vec y(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) y[i] = apply_activation(act, pre[i]);
    return y;
}

Vec DenseLayer::backward_pre(const Vec &x, const Vec &gpre) {
    Vec gx(in, 0.0);
    for (int r = 0; r < out; ++r) {
        const double g = gpre[r];
        gb[r] += g;
        double *grow = &gw[static_cast<std::size_t>(r) * in];
        const double *row = &w[static_cast<std::size_t>(r) * in];
        for (int c = 0; c < in; ++c) {
            grow[c] += g * x[c];
            gx[c] += g * row[c];
        }
    }
    return gx;
}

Vec stack_forward(std::vector<DenseLayer> &layers, const Vec &x, StackTape *tape) {
    if (tape) {
        tape->inputs.clear();
        tape->pre.clear();
    }
    Vec cur = x;
    for (auto &layer : layers) {
        Vec pre = layer.affine(cur);
        if (tape) {
            tape->inputs.push_back(std::move(cur));
            tape->pre.push_back(pre);
        }
        cur = layer.activate(pre);
    }
    return cur;
}

Vec stack_backward(std::vector<DenseLayer> &layers, const StackTape &tape, const Vec &gout) {
    Vec g = gout;
    for (int i = static_cast<int>(layers.size()) - 1; i >= 0; --i) {
        Vec gpre(g.size());
        for (std::size_t j = 0; j < g.size(); ++j)
            gpre[j] = g[j] * activation_grad(layers[i].act, tape.pre[i][j]);
        g = layers[i].backward_pre(tape.inputs[i], gpre);
    }
    return g;
}

double clip_global_norm(const std::vector<std::span<double>> &grads, double max_norm) {
    double sq = 0.0;
    for (const auto &block : grads)
        for (double g : block) sq += g * g;
    if (!std::isfinite(sq)) throw TrainingError("non-finite gradient");
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (const auto &block : grads)
            for (double &g : block) g *= scale;
    }
    return norm;
}

void adam_step(const std::vector<std::span<double>> &params,
               const std::vector<std::span<double>> &grads, AdamState &state) {
    std::size_t total = 0;
    for (const auto &block : params) total += block.size();
    if (state.m.size() != total) {
        state.m.assign(total, 0.0);
        state.v.assign(total, 0.0);
        state.step = 0;
    }

    clip_global_norm(grads, state.clip_norm);

    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    std::size_t k = 0;
    for (std::size_t bi = 0; bi < params.size(); ++bi) {
        auto p = params[bi];
        auto g = grads[bi];
        for (std::size_t i = 0; i < p.size(); ++i, ++k) {
            state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g[i];
            state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = state.m[k] / bc1;
            const double vhat = state.v[k] / bc2;
            p[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

} // namespace qspirl
