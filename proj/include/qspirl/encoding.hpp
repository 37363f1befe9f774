#pragma once

#include <array>
#include <vector>

#include "qspirl/gridworld.hpp"
#include "qspirl/rng.hpp"

namespace qspirl {

inline constexpr int kInputDim = 29; // 8 + 5 + 8 + 8 one-hot blocks

using OneHotVec = std::array<double, kInputDim>;

/// Block layout: [0..7] obstacle region, [8..12] motion direction,
/// [13..20] target region, [21..28] angle bin. Exactly four ones.
OneHotVec one_hot(const ObsState &obs);

/// T x 29 binary spike matrix drawn by the frequency-based Poisson encoder.
struct SpikeTrain {
    int timesteps = 0;
    double dt = 0.0;    // seconds per simulation step
    double f_max = 0.0; // Hz assigned to active channels
    std::vector<double> spikes; // row-major T x kInputDim, entries 0 or 1

    double at(int t, int j) const { return spikes[static_cast<std::size_t>(t) * kInputDim + j]; }
};

/// Per-step spike probability for a neuron with firing rate `rate`:
/// p = 1 - exp(-rate * dt).
double spike_probability(double rate, double dt);

/// Rates are f_max scaled by the one-hot entry, so active channels fire at
/// f_max and inactive ones stay silent. Each spike is an independent
/// Bernoulli draw; the rng fully determines the output.
SpikeTrain poisson_encode(const OneHotVec &x, double f_max, int timesteps, double dt, Rng &rng);

} // namespace qspirl
