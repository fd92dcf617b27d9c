#include "aprep/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace aprep {

StateVector apply_circuit(const Circuit& c, const StateVector& s) {
    if (c.n_qubits() != s.n_qubits()) {
        throw std::invalid_argument("apply_circuit: circuit has " + std::to_string(c.n_qubits()) +
                                    " qubits, state has " + std::to_string(s.n_qubits()));
    }
    StateVector out = s;
    auto amps = out.amplitudes_mut();
    for (const auto& g : c.gates()) {
        kernels::apply_gate(amps, g);
    }
    return out;
}

StateVector prepare(const Circuit& c) { return apply_circuit(c, StateVector(c.n_qubits())); }

NoiseModel::NoiseModel(double p1_, double p2_) : p1(p1_), p2(p2_) {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
}

DensityMatrix::DensityMatrix(std::size_t n_qubits) : n_(n_qubits), dim_(std::size_t{1} << n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxDensityQubits) {
        throw std::invalid_argument("density matrix: qubit count out of range");
    }
    m_.assign(dim_ * dim_, 0.0);
    m_[0] = 1.0;
}

DensityMatrix DensityMatrix::from_pure(const StateVector& s) {
    DensityMatrix rho(s.n_qubits());
    for (std::size_t r = 0; r < rho.dim_; ++r) {
        for (std::size_t c = 0; c < rho.dim_; ++c) {
            rho.m_[r * rho.dim_ + c] = s[r] * std::conj(s[c]);
        }
    }
    return rho;
}

Complex DensityMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        t += m_[i * dim_ + i];
    }
    return t;
}

double DensityMatrix::expectation(const StateVector& psi) const {
    if (psi.n_qubits() != n_) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    Complex acc = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        Complex row = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) {
            row += m_[r * dim_ + c] * psi[c];
        }
        acc += std::conj(psi[r]) * row;
    }
    return acc.real();
}

// Element (r, c) lives at r * dim + c, i.e. a 2n-qubit vector whose low n bits
// are the column index. U rho U^dagger is U on the row bits and conj(U) on the
// column bits.
void DensityMatrix::apply_gate(const Gate& g) {
    kernels::apply_gate(m_, g, n_, false);
    kernels::apply_gate(m_, g, 0, true);
}

void DensityMatrix::depolarize(std::span<const std::size_t> support, double p) {
    if (p == 0.0) {
        return;
    }
    std::size_t mask = 0;
    for (auto q : support) {
        mask |= std::size_t{1} << q;
    }
    std::vector<std::size_t> sub;  // every assignment of the support bits
    for (std::size_t s = 0;; s = (s - mask) & mask) {
        sub.push_back(s);
        if (((s - mask) & mask) == 0) {
            break;
        }
    }
    const double keep = 1.0 - p;
    const double mix = p / static_cast<double>(sub.size());
    for (std::size_t r0 = 0; r0 < dim_; ++r0) {
        if (r0 & mask) {
            continue;
        }
        for (std::size_t c0 = 0; c0 < dim_; ++c0) {
            if (c0 & mask) {
                continue;
            }
            Complex traced = 0.0;
            for (auto s : sub) {
                traced += m_[(r0 | s) * dim_ + (c0 | s)];
            }
            for (auto sr : sub) {
                for (auto sc : sub) {
                    auto& e = m_[(r0 | sr) * dim_ + (c0 | sc)];
                    e *= keep;
                    if (sr == sc) {
                        e += mix * traced;
                    }
                }
            }
        }
    }
}

DensityMatrix apply_noisy(const Circuit& c, const NoiseModel& noise) {
    DensityMatrix rho(c.n_qubits());
    for (const auto& g : c.gates()) {
        rho.apply_gate(g);
        rho.depolarize(g.qubits(), g.arity() == 2 ? noise.p2 : noise.p1);
    }
    return rho;
}

double noisy_fidelity(const Circuit& c, const StateVector& target, const NoiseModel& noise) {
    if (c.n_qubits() != target.n_qubits()) {
        throw std::invalid_argument("noisy_fidelity: dimension mismatch");
    }
    if (c.n_qubits() > kMaxDensityQubits) {
        const double f = fidelity_pure(target, prepare(c));
        return predicted_noisy_fidelity(predicted_noisy_fidelity(f, cnot_count(c), noise.p2),
                                        single_qubit_count(c), noise.p1);
    }
    return apply_noisy(c, noise).expectation(target);
}

double predicted_noisy_fidelity(double noiseless_f, std::size_t l, double p) {
    return noiseless_f * std::pow(1.0 - p, static_cast<double>(l));
}

}  // namespace aprep
