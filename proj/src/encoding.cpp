#include "qspirl/encoding.hpp"

#include <cmath>

#include "qspirl/errors.hpp"

namespace qspirl {

OneHotVec one_hot(const ObsState &obs) {
    if (!obs.valid()) throw UsageError("observation field out of range");
    OneHotVec x{};
    x[obs.obstacle_region - 1] = 1.0;
    x[8 + obs.motion_dir] = 1.0;
    x[13 + obs.target_region - 1] = 1.0;
    x[21 + obs.angle_bin - 1] = 1.0;
    return x;
}

double spike_probability(double rate, double dt) { return 1.0 - std::exp(-rate * dt); }

SpikeTrain poisson_encode(const OneHotVec &x, double f_max, int timesteps, double dt, Rng &rng) {
    if (timesteps < 1) throw UsageError("spike train needs at least one timestep");
    if (dt <= 0.0 || f_max <= 0.0) throw UsageError("dt and f_max must be positive");
    std::array<double, kInputDim> p;
    for (int j = 0; j < kInputDim; ++j) p[j] = spike_probability(f_max * x[j], dt);
    SpikeTrain train;
    train.timesteps = timesteps;
    train.dt = dt;
    train.f_max = f_max;
    train.spikes.resize(static_cast<std::size_t>(timesteps) * kInputDim);
    for (int t = 0; t < timesteps; ++t)
        for (int j = 0; j < kInputDim; ++j)
            train.spikes[static_cast<std::size_t>(t) * kInputDim + j] =
                (p[j] > 0.0 && rng.bernoulli(p[j])) ? 1.0 : 0.0;
    return train;
}

} // namespace qspirl
