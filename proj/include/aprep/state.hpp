#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aprep/circuit.hpp"

namespace aprep {

using Complex = std::complex<double>;
/// Row-major 2x2 matrix.
using Mat2 = std::array<Complex, 4>;

/// Pure n-qubit state. Amplitude index bit q is qubit q (qubit 0 is the least
/// significant bit). Amplitudes are indexed by logical qubit.
class StateVector {
public:
    /// |00...0>
    explicit StateVector(std::size_t n_qubits);
    /// Throws unless the amplitude count is 2^n and the norm is 1 within 1e-10.
    StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes);
    /// Normalizes; throws on a zero vector.
    static StateVector normalized(std::size_t n_qubits, std::vector<Complex> amplitudes);
    static StateVector basis(std::size_t n_qubits, std::size_t index);

    std::size_t n_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes_mut() { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    double norm() const;

private:
    struct Unchecked {};
    StateVector(Unchecked, std::size_t n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {}

    std::size_t n_;
    std::vector<Complex> amps_;

};

Complex inner(const StateVector& a, const StateVector& b);

/// |<a|b>|^2
double fidelity_pure(const StateVector& a, const StateVector& b);

/// arccos |<a|b>|, in [0, pi/2].
double fubini_study_distance(const StateVector& a, const StateVector& b);

/// Text format: header "qubits <n>" then one "<re> <im>" line per amplitude.
std::string format_state(const StateVector& s);
StateVector parse_state(std::string_view text);

namespace kernels {

/// In-place kernels over a raw amplitude buffer of 2^k entries.
void apply_1q(std::span<Complex> amps, std::size_t qubit, const Mat2& u);
void apply_x(std::span<Complex> amps, std::size_t qubit);
void apply_diag(std::span<Complex> amps, std::size_t qubit, Complex d0, Complex d1);
void apply_cx(std::span<Complex> amps, std::size_t control, std::size_t target);
void apply_gate(std::span<Complex> amps, const Gate& g, std::size_t offset = 0, bool conjugate = false);

}  // namespace kernels

Mat2 gate_matrix(const Gate& g);
Mat2 matmul(const Mat2& a, const Mat2& b);
Mat2 dagger(const Mat2& a);

}  // namespace aprep
