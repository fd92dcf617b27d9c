#pragma once

#include <cstddef>
#include <vector>

#include "aprep/circuit.hpp"
#include "aprep/state.hpp"

namespace aprep {

/// U_C |s>. Gates act on logical qubits; the layout only places logical qubits
/// on hardware and does not change the logical output state.
StateVector apply_circuit(const Circuit& c, const StateVector& s);

/// U_C |00...0>
StateVector prepare(const Circuit& c);

/// Depolarizing probabilities per single-qubit gate (p1) and per CX (p2).
struct NoiseModel {
    double p1 = 0.00088;
    double p2 = 0.0088;

    NoiseModel() = default;
    NoiseModel(double p1_, double p2_);

    static NoiseModel noiseless() { return {0.0, 0.0}; }
};

/// Dense 2^n x 2^n density matrix, row-major.
class DensityMatrix {
public:
    /// |00...0><00...0|
    explicit DensityMatrix(std::size_t n_qubits);
    static DensityMatrix from_pure(const StateVector& s);

    std::size_t n_qubits() const { return n_; }
    std::size_t dim() const { return dim_; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return m_[r * dim_ + c]; }
    std::span<const Complex> data() const { return m_; }

    Complex trace() const;
    /// <psi| rho |psi>, real part.
    double expectation(const StateVector& psi) const;

    void apply_gate(const Gate& g);
    /// rho -> (1 - p) rho + p Tr_S(rho) (x) I_S / 2^|S| on the gate's support S.
    void depolarize(std::span<const std::size_t> support, double p);

private:
    std::size_t n_;
    std::size_t dim_;
    std::vector<Complex> m_;
};

/// Largest qubit count simulated with a dense density matrix.
inline constexpr std::size_t kMaxDensityQubits = 10;

/// Starting from |0...0><0...0|, each gate unitary is followed by a
/// depolarizing channel on that gate's qubits with p1 or p2 by arity.
DensityMatrix apply_noisy(const Circuit& c, const NoiseModel& noise);

/// <target| rho |target> with rho = apply_noisy(c, noise). Above
/// kMaxDensityQubits this falls back to the product of the noiseless fidelity
/// and the no-error probabilities (1-p2)^cx (1-p1)^single.
double noisy_fidelity(const Circuit& c, const StateVector& target, const NoiseModel& noise);

/// noiseless_f * (1 - p)^l
double predicted_noisy_fidelity(double noiseless_f, std::size_t l, double p);

}  // namespace aprep
