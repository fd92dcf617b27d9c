#include "aprep/haar.hpp"

#include <stdexcept>

namespace aprep {

StateVector sample_haar_state(std::size_t n, Rng& rng) {
    if (n < 1 || n > 12) {
        throw std::invalid_argument("sample_haar_state: n must be in [1, 12]");
    }
    std::vector<Complex> amps(std::size_t{1} << n);
    for (auto& a : amps) {
        const double re = rng.normal();
        const double im = rng.normal();
        a = Complex(re, im);
    }
    return StateVector::normalized(n, std::move(amps));
}

Gate random_cx(const CouplingMap& m, std::span<const std::size_t> layout, Rng& rng) {
    if (m.edges().empty()) {
        throw std::invalid_argument("random_cx: coupling map has no edges");
    }
    auto [a, b] = m.edges()[rng.index(m.edges().size())];
    if (rng.bernoulli(0.5)) {
        std::swap(a, b);
    }
    const auto inv = invert_permutation(layout);
    return Gate::cx(inv[a], inv[b]);
}

Gate random_gate(const CouplingMap& m, std::span<const std::size_t> layout, Rng& rng) {
    const std::size_t kinds = m.edges().empty() ? 3 : 4;
    const std::size_t n = m.n_qubits();
    switch (rng.index(kinds)) {
        case 0: {
            const auto q = rng.index(n);
            return Gate::rz(q, rng.uniform(0.0, kTwoPi));
        }
        case 1:
            return Gate::x(rng.index(n));
        case 2:
            return Gate::sx(rng.index(n));
        default:
            return random_cx(m, layout, rng);
    }
}

Circuit random_circuit(std::size_t n, std::size_t length, const CouplingMap& m, Rng& rng) {
    if (m.n_qubits() != n) {
        throw std::invalid_argument("random_circuit: coupling map size mismatch");
    }
    const auto layout = identity_layout(n);
    std::vector<Gate> gates;
    gates.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        gates.push_back(random_gate(m, layout, rng));
    }
    return {n, std::move(gates)};
}

}  // namespace aprep
