#pragma once

#include <vector>

#include "qspirl/neural.hpp"

namespace qspirl {

/// Leaky integrate-and-fire constants. The exponential decay factors are
/// derived from the time constants and the simulation step.
struct LIFParams {
    double tau_mem = 0.02;
    double tau_syn = 0.01;
    double dt = 0.2;
    double v_th = 1.0;
    double v_reset = 0.0;

    double beta_v() const;
    double beta_i() const;
    void validate() const; // decay factors must lie in (0, 1)
};

struct LIFState {
    Vec v; // membrane potential
    Vec i; // synaptic current

    explicit LIFState(int n) : v(n, 0.0), i(n, 0.0) {}
};

/// One discrete LIF update: current first, then voltage, then threshold with
/// soft reset (spiking neurons keep the super-threshold residual).
///   i <- beta_i * i + input;  v <- beta_v * v + (1 - beta_v) * i
Vec lif_step(LIFState &state, const Vec &weighted_input, const LIFParams &params);

/// Derivative of the fast-sigmoid spike surrogate at membrane potential v.
double surrogate_grad(double v, double v_th, double k = 25.0);

struct LIFTape {
    std::vector<Vec> v_pre;  // membrane before reset, per timestep
    std::vector<Vec> spikes; // emitted spikes, per timestep
};

/// Runs a LIF population over a full input sequence, recording the tape.
std::vector<Vec> lif_forward(const std::vector<Vec> &weighted_inputs, const LIFParams &params,
                             LIFTape *tape);

/// Backpropagation through time with the spike derivative replaced by the
/// fast-sigmoid surrogate; the reset path is treated as constant. Returns
/// d(loss)/d(weighted_input_t) for every timestep.
std::vector<Vec> lif_backward(const LIFTape &tape, const std::vector<Vec> &gspikes,
                              const LIFParams &params, double surrogate_k = 25.0);

/// Temporal mean over a T x n sequence.
Vec mean_pool(const std::vector<Vec> &outputs);

/// Distributes a pooled gradient back to each timestep (divided by T).
std::vector<Vec> mean_pool_backward(const Vec &gpooled, int timesteps);

} // namespace qspirl
