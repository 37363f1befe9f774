#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qspirl/rng.hpp"

namespace qspirl {

using Complex = std::complex<double>;

/// Exact statevector of a q-qubit register. Qubit i maps to bit i of the
/// basis index.
struct StateVector {
    int qubits = 0;
    std::vector<Complex> amps;

    explicit StateVector(int q);
    double norm() const;
};

/// Row-major 2x2 unitary.
struct Gate2 {
    Complex m00, m01, m10, m11;
};

Gate2 gate_h();
Gate2 gate_rx(double theta);
Gate2 gate_ry(double theta);
Gate2 gate_rz(double theta);
/// General single-qubit rotation: RZ(omega) RY(theta) RZ(phi).
Gate2 gate_rot(double phi, double theta, double omega);

void apply_1q(StateVector &state, const Gate2 &g, int target);
void apply_controlled(StateVector &state, const Gate2 &g, int control, int target);
void apply_cnot(StateVector &state, int control, int target);

double z_expectation(const StateVector &state, int qubit);
std::vector<double> all_z_expectations(const StateVector &state);

/// Ansatz shape: a Hadamard wall, one RY(pi * x_i) encoding per qubit, then
/// L layers of per-qubit Rot followed by a CRot ring i -> (i+1) mod q.
/// Parameters per layer: 3q Rot angles then 3q CRot angles. A single-qubit
/// register has no ring, so only the Rot angles remain.
struct CircuitSpec {
    int qubits = 8;
    int layers = 3;

    int params_per_layer() const { return qubits > 1 ? 6 * qubits : 3; }
    int param_count() const { return layers * params_per_layer(); }
};

/// Full circuit state for encoding angles a (radians) and parameters theta.
StateVector run_circuit_angles(const CircuitSpec &spec, std::span<const double> angles,
                               std::span<const double> theta);

/// Pauli-Z expectations for inputs x in [0,1]^q (values outside are clamped;
/// see quantum_clamp_count). Encoding angle is a_i = pi * x_i.
std::vector<double> run_circuit(const CircuitSpec &spec, std::span<const double> x,
                                std::span<const double> theta);

/// Number of input components clamped into [0,1] so far (process-wide).
std::uint64_t quantum_clamp_count();

struct CircuitGrad {
    std::vector<double> dtheta;
    std::vector<double> dx;
};

/// Exact gradients of upstream . <Z> via the parameter-shift rule: two-term
/// rule for Rot angles and the four-term rule for controlled rotations.
/// Input gradients chain through the RY encoding angle a_i = pi * x_i.
CircuitGrad parameter_shift_grad(const CircuitSpec &spec, std::span<const double> x,
                                 std::span<const double> theta,
                                 std::span<const double> upstream);

/// Per-qubit Z means over `shots` bitstrings drawn from |amplitude|^2.
std::vector<double> sample_z_means(const StateVector &state, int shots, Rng &rng);

/// Empirical per-qubit Z means from `shots` bitstring samples of the final
/// state. Evaluation-time alternative to the analytic expectations; never
/// used for gradients.
std::vector<double> sampled_expectation(const CircuitSpec &spec, std::span<const double> x,
                                        std::span<const double> theta, int shots, Rng &rng);

} // namespace qspirl
