#include "qspirl/quantum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

#include "qspirl/errors.hpp"

namespace qspirl {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::atomic<std::uint64_t> g_clamp_count{0};

void note_clamp() {
    if (g_clamp_count.fetch_add(1) == 0)
        std::cerr << "warning: circuit input outside [0,1], clamping (reported once)\n";
}

} // namespace

StateVector::StateVector(int q) : qubits(q), amps(std::size_t{1} << q, Complex{0.0, 0.0}) {
    if (q < 1 || q > 20) throw UsageError("unsupported qubit count");
    amps[0] = Complex{1.0, 0.0};
}

double StateVector::norm() const {
    double sq = 0.0;
    for (const Complex &a : amps) sq += std::norm(a);
    return std::sqrt(sq);
}

Gate2 gate_h() {
    const double s = 1.0 / std::sqrt(2.0);
    return {Complex{s, 0}, Complex{s, 0}, Complex{s, 0}, Complex{-s, 0}};
}

Gate2 gate_rx(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
}

Gate2 gate_ry(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
}

Gate2 gate_rz(double theta) {
    return {std::polar(1.0, -theta / 2.0), Complex{0, 0}, Complex{0, 0},
            std::polar(1.0, theta / 2.0)};
}

Gate2 gate_rot(double phi, double theta, double omega) {
    // RZ(omega) * RY(theta) * RZ(phi), multiplied out numerically
    const Gate2 a = gate_rz(omega), b = gate_ry(theta), c = gate_rz(phi);
    auto mul = [](const Gate2 &x, const Gate2 &y) {
        return Gate2{x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
                     x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
    };
    return mul(a, mul(b, c));
}

void apply_1q(StateVector &state, const Gate2 &g, int target) {
    if (target < 0 || target >= state.qubits) throw UsageError("gate target out of range");
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t n = state.amps.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i & bit) continue;
        const Complex a0 = state.amps[i];
        const Complex a1 = state.amps[i | bit];
        state.amps[i] = g.m00 * a0 + g.m01 * a1;
        state.amps[i | bit] = g.m10 * a0 + g.m11 * a1;
    }
}

void apply_controlled(StateVector &state, const Gate2 &g, int control, int target) {
    if (control == target) throw UsageError("control equals target");
    if (control < 0 || control >= state.qubits || target < 0 || target >= state.qubits)
        throw UsageError("gate target out of range");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t n = state.amps.size();
    for (std::size_t i = 0; i < n; ++i) {
        if ((i & cbit) == 0 || (i & tbit)) continue;
        const Complex a0 = state.amps[i];
        const Complex a1 = state.amps[i | tbit];
        state.amps[i] = g.m00 * a0 + g.m01 * a1;
        state.amps[i | tbit] = g.m10 * a0 + g.m11 * a1;
    }
}

void apply_cnot(StateVector &state, int control, int target) {
    apply_controlled(state, Gate2{Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}},
                     control, target);
}

double z_expectation(const StateVector &state, int qubit) {
    if (qubit < 0 || qubit >= state.qubits) throw UsageError("qubit out of range");
    const std::size_t bit = std::size_t{1} << qubit;
    double z = 0.0;
    for (std::size_t i = 0; i < state.amps.size(); ++i)
        z += ((i & bit) ? -1.0 : 1.0) * std::norm(state.amps[i]);
    return z;
}

std::vector<double> all_z_expectations(const StateVector &state) {
    std::vector<double> z(state.qubits, 0.0);
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        const double p = std::norm(state.amps[i]);
        for (int q = 0; q < state.qubits; ++q) z[q] += ((i >> q) & 1) ? -p : p;
    }
    return z;
}

StateVector run_circuit_angles(const CircuitSpec &spec, std::span<const double> angles,
                               std::span<const double> theta) {
    if (static_cast<int>(angles.size()) != spec.qubits)
        throw UsageError("encoding angle count mismatch");
    if (static_cast<int>(theta.size()) != spec.param_count())
        throw UsageError("circuit parameter count mismatch");
    StateVector state(spec.qubits);
    const Gate2 h = gate_h();
    for (int q = 0; q < spec.qubits; ++q) apply_1q(state, h, q);
    for (int q = 0; q < spec.qubits; ++q) apply_1q(state, gate_ry(angles[q]), q);
    const int per_layer = spec.params_per_layer();
    for (int l = 0; l < spec.layers; ++l) {
        const double *rot = theta.data() + l * per_layer;
        for (int q = 0; q < spec.qubits; ++q)
            apply_1q(state, gate_rot(rot[3 * q], rot[3 * q + 1], rot[3 * q + 2]), q);
        if (spec.qubits > 1) {
            const double *crot = rot + 3 * spec.qubits;
            for (int q = 0; q < spec.qubits; ++q)
                apply_controlled(state,
                                 gate_rot(crot[3 * q], crot[3 * q + 1], crot[3 * q + 2]), q,
                                 (q + 1) % spec.qubits);
        }
    }
    return state;
}

namespace {

std::vector<double> encode_angles(const CircuitSpec &spec, std::span<const double> x) {
    std::vector<double> angles(spec.qubits);
    for (int q = 0; q < spec.qubits; ++q) {
        double v = x[q];
        if (v < 0.0 || v > 1.0) {
            note_clamp();
            v = v < 0.0 ? 0.0 : 1.0;
        }
        angles[q] = kPi * v;
    }
    return angles;
}

} // namespace

std::vector<double> run_circuit(const CircuitSpec &spec, std::span<const double> x,
                                std::span<const double> theta) {
    if (static_cast<int>(x.size()) != spec.qubits) throw UsageError("circuit input size mismatch");
    return all_z_expectations(run_circuit_angles(spec, encode_angles(spec, x), theta));
}

std::uint64_t quantum_clamp_count() { return g_clamp_count.load(); }

CircuitGrad parameter_shift_grad(const CircuitSpec &spec, std::span<const double> x,
                                 std::span<const double> theta,
                                 std::span<const double> upstream) {
    if (static_cast<int>(upstream.size()) != spec.qubits)
        throw UsageError("upstream gradient size mismatch");
    const std::vector<double> angles = encode_angles(spec, x);

    std::vector<double> shifted(theta.begin(), theta.end());
    auto contracted = [&](std::span<const double> th) {
        const std::vector<double> z = all_z_expectations(run_circuit_angles(spec, angles, th));
        double f = 0.0;
        for (int q = 0; q < spec.qubits; ++q) f += upstream[q] * z[q];
        return f;
    };

    CircuitGrad grad;
    grad.dtheta.assign(theta.size(), 0.0);
    grad.dx.assign(spec.qubits, 0.0);

    bool upstream_zero = true;
    for (double u : upstream)
        if (u != 0.0) upstream_zero = false;
    if (upstream_zero) return grad;

    const int per_layer = spec.params_per_layer();
    const double half_pi = kPi / 2.0;
    // four-term rule coefficients for controlled rotations
    const double sqrt2 = std::sqrt(2.0);
    const double c_plus = (sqrt2 + 1.0) / (4.0 * sqrt2);
    const double c_minus = (sqrt2 - 1.0) / (4.0 * sqrt2);

    for (std::size_t k = 0; k < shifted.size(); ++k) {
        const bool is_crot = (static_cast<int>(k) % per_layer) >= 3 * spec.qubits;
        const double original = shifted[k];
        if (!is_crot) {
            shifted[k] = original + half_pi;
            const double plus = contracted(shifted);
            shifted[k] = original - half_pi;
            const double minus = contracted(shifted);
            grad.dtheta[k] = 0.5 * (plus - minus);
        } else {
            shifted[k] = original + half_pi;
            const double p1 = contracted(shifted);
            shifted[k] = original - half_pi;
            const double m1 = contracted(shifted);
            shifted[k] = original + 3.0 * half_pi;
            const double p3 = contracted(shifted);
            shifted[k] = original - 3.0 * half_pi;
            const double m3 = contracted(shifted);
            grad.dtheta[k] = c_plus * (p1 - m1) - c_minus * (p3 - m3);
        }
        shifted[k] = original;
    }

    // Input gradients: shift the RY encoding angle, then chain a_i = pi * x_i.
    std::vector<double> sh_angles = angles;
    auto contracted_angles = [&](std::span<const double> a) {
        const std::vector<double> z = all_z_expectations(run_circuit_angles(spec, a, theta));
        double f = 0.0;
        for (int q = 0; q < spec.qubits; ++q) f += upstream[q] * z[q];
        return f;
    };
    for (int q = 0; q < spec.qubits; ++q) {
        if (x[q] < 0.0 || x[q] > 1.0) continue; // clamped: zero gradient
        const double original = sh_angles[q];
        sh_angles[q] = original + half_pi;
        const double plus = contracted_angles(sh_angles);
        sh_angles[q] = original - half_pi;
        const double minus = contracted_angles(sh_angles);
        sh_angles[q] = original;
        grad.dx[q] = kPi * 0.5 * (plus - minus);
    }
    return grad;
}

std::vector<double> sample_z_means(const StateVector &state, int shots, Rng &rng) {
    if (shots < 1) throw UsageError("shots must be >= 1");
    std::vector<double> cdf(state.amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }
    std::vector<double> z(state.qubits, 0.0);
    for (int s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        for (int q = 0; q < state.qubits; ++q) z[q] += ((idx >> q) & 1) ? -1.0 : 1.0;
    }
    for (double &v : z) v /= static_cast<double>(shots);
    return z;
}

std::vector<double> sampled_expectation(const CircuitSpec &spec, std::span<const double> x,
                                        std::span<const double> theta, int shots, Rng &rng) {
    return sample_z_means(run_circuit_angles(spec, encode_angles(spec, x), theta), shots, rng);
}

} // namespace qspirl
