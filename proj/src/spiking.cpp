#include "qspirl/spiking.hpp"

#include <cmath>

#include "qspirl/errors.hpp"

namespace qspirl {

double LIFParams::beta_v() const { return std::exp(-dt / tau_mem); }
double LIFParams::beta_i() const { return std::exp(-dt / tau_syn); }

void LIFParams::validate() const {
    if (tau_mem <= 0.0 || tau_syn <= 0.0 || dt <= 0.0)
        throw ConfigError("LIF time constants and dt must be positive");
    const double bv = beta_v(), bi = beta_i();
    if (!(bv > 0.0 && bv < 1.0 && bi > 0.0 && bi < 1.0))
        throw ConfigError("LIF decay factors must lie in (0, 1)");
}

Vec lif_step(LIFState &state, const Vec &weighted_input, const LIFParams &params) {
    if (state.v.size() != weighted_input.size()) throw UsageError("LIF state shape mismatch");
    const double bv = params.beta_v(), bi = params.beta_i();
    Vec spikes(state.v.size(), 0.0);
    for (std::size_t j = 0; j < state.v.size(); ++j) {
        state.i[j] = bi * state.i[j] + weighted_input[j];
        state.v[j] = bv * state.v[j] + (1.0 - bv) * state.i[j];
        if (state.v[j] >= params.v_th) {
            spikes[j] = 1.0;
            state.v[j] -= params.v_th;
        }
    }
    return spikes;
}

double surrogate_grad(double v, double v_th, double k) {
    const double d = 1.0 + k * std::abs(v - v_th);
    return 1.0 / (d * d);
}

std::vector<Vec> lif_forward(const std::vector<Vec> &weighted_inputs, const LIFParams &params,
                             LIFTape *tape) {
    if (weighted_inputs.empty()) throw UsageError("empty LIF input sequence");
    const int n = static_cast<int>(weighted_inputs.front().size());
    LIFState state(n);
    const double bv = params.beta_v(), bi = params.beta_i();
    std::vector<Vec> out;
    out.reserve(weighted_inputs.size());
    if (tape) {
        tape->v_pre.clear();
        tape->spikes.clear();
    }
    for (const Vec &u : weighted_inputs) {
        Vec spikes(n, 0.0);
        Vec v_pre(n);
        for (int j = 0; j < n; ++j) {
            state.i[j] = bi * state.i[j] + u[j];
            state.v[j] = bv * state.v[j] + (1.0 - bv) * state.i[j];
            v_pre[j] = state.v[j];
            if (state.v[j] >= params.v_th) {
                spikes[j] = 1.0;
                state.v[j] -= params.v_th;
            }
        }
        if (tape) {
            tape->v_pre.push_back(std::move(v_pre));
            tape->spikes.push_back(spikes);
        }
        out.push_back(std::move(spikes));
    }
    return out;
}

std::vector<Vec> lif_backward(const LIFTape &tape, const std::vector<Vec> &gspikes,
                              const LIFParams &params, double surrogate_k) {
    const int T = static_cast<int>(tape.v_pre.size());
    if (static_cast<int>(gspikes.size()) != T) throw UsageError("LIF gradient length mismatch");
    const int n = T > 0 ? static_cast<int>(tape.v_pre.front().size()) : 0;
    const double bv = params.beta_v(), bi = params.beta_i();

    std::vector<Vec> ginput(T, Vec(n, 0.0));
    Vec gv_next(n, 0.0); // d(loss)/d(post-reset membrane at t)
    Vec gi_next(n, 0.0); // d(loss)/d(current at t+1)
    for (int t = T - 1; t >= 0; --t) {
        for (int j = 0; j < n; ++j) {
            const double gv = bv * gv_next[j] +
                              gspikes[t][j] * surrogate_grad(tape.v_pre[t][j], params.v_th,
                                                             surrogate_k);
            const double gi = (1.0 - bv) * gv + bi * gi_next[j];
            ginput[t][j] = gi;
            gv_next[j] = gv;
            gi_next[j] = gi;
        }
    }
    return ginput;
}

Vec mean_pool(const std::vector<Vec> &outputs) {
    if (outputs.empty()) throw UsageError("mean_pool of empty sequence");
    Vec pooled(outputs.front().size(), 0.0);
    for (const Vec &o : outputs)
        for (std::size_t j = 0; j < pooled.size(); ++j) pooled[j] += o[j];
    const double inv = 1.0 / static_cast<double>(outputs.size());
    for (double &v : pooled) v *= inv;
    return pooled;
}

std::vector<Vec> mean_pool_backward(const Vec &gpooled, int timesteps) {
    Vec per_step(gpooled.size());
    for (std::size_t j = 0; j < gpooled.size(); ++j)
        per_step[j] = gpooled[j] / static_cast<double>(timesteps);
    return std::vector<Vec>(timesteps, per_step);
}

} // namespace qspirl
