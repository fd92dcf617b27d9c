#include "aprep/circuit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aprep/coupling_map.hpp"
#include "aprep/haar.hpp"
#include "aprep/simulator.hpp"

using namespace aprep;

namespace {

constexpr double kPi = std::numbers::pi;

bool same_action(const Circuit& a, const Circuit& b) {
    const auto dim = std::size_t{1} << a.n_qubits();
    for (std::size_t i = 0; i < dim; ++i) {
        const auto basis = StateVector::basis(a.n_qubits(), i);
        if (std::abs(inner(apply_circuit(a, basis), apply_circuit(b, basis))) < 1.0 - 1e-10) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(circuit, cost_and_counts) {
    Circuit c(3, {Gate::x(0), Gate::cx(0, 1), Gate::sx(2), Gate::rz(1, 0.3), Gate::cx(1, 2)});
    EXPECT_EQ(cost(c), 23u);
    EXPECT_EQ(cnot_count(c), 2u);
    EXPECT_EQ(single_qubit_count(c), 3u);
    EXPECT_EQ(cost(Circuit(2)), 0u);
    EXPECT_EQ(cnot_count(Circuit(2)), 0u);

    std::vector<Gate> five(5, Gate::cx(0, 1));
    EXPECT_EQ(cost(Circuit(2, five)), 50u);
    EXPECT_EQ(cnot_count(Circuit(3, {Gate::cx(0, 1), Gate::x(0), Gate::cx(1, 2)})), 2u);
}

TEST(circuit, gate_invariants) {
    EXPECT_THROW(Gate::cx(1, 1), std::invalid_argument);
    EXPECT_NEAR(Gate::rz(0, -0.5).angle(), kTwoPi - 0.5, 1e-15);
    EXPECT_NEAR(Gate::rz(0, 7.0).angle(), 7.0 - kTwoPi, 1e-15);
    EXPECT_TRUE(Gate::rz(0, 1.0).param().has_value());
    EXPECT_FALSE(Gate::sx(0).param().has_value());
    EXPECT_FALSE(Gate::cx(0, 1).param().has_value());
    EXPECT_EQ(Gate::cx(2, 0).arity(), 2u);
    EXPECT_EQ(Gate::x(2).arity(), 1u);
}

TEST(circuit, construction_checks) {
    EXPECT_THROW(Circuit(0), std::invalid_argument);
    EXPECT_THROW(Circuit(2, {Gate::x(2)}), std::invalid_argument);
    EXPECT_THROW(Circuit(2, {}, {0, 0}), std::invalid_argument);
    EXPECT_THROW(Circuit(2, {}, {0}), std::invalid_argument);
    EXPECT_NO_THROW(Circuit(3, {}, {2, 0, 1}));
}

TEST(circuit, inverse_of) {
    EXPECT_EQ(inverse_of(Gate::x(1)), std::vector<Gate>{Gate::x(1)});
    EXPECT_EQ(inverse_of(Gate::cx(0, 2)), std::vector<Gate>{Gate::cx(0, 2)});
    auto rz = inverse_of(Gate::rz(0, 1.25));
    ASSERT_EQ(rz.size(), 1u);
    EXPECT_NEAR(rz[0].angle(), kTwoPi - 1.25, 1e-15);

    for (auto g : {Gate::sx(0), Gate::rz(0, 2.0), Gate::x(0)}) {
        std::vector<Gate> seq{g};
        auto inv = inverse_of(g);
        seq.insert(seq.end(), inv.begin(), inv.end());
        EXPECT_TRUE(same_action(Circuit(1, seq), Circuit(1)));
    }
}

TEST(circuit, clean_examples) {
    EXPECT_TRUE(clean(Circuit(1, {Gate::x(0), Gate::x(0)})).empty());

    auto merged = clean(Circuit(1, {Gate::rz(0, 1.0), Gate::rz(0, 2.0)}));
    ASSERT_EQ(merged.size(), 1u);
    EXPECT_NEAR(merged[0].angle(), 3.0, 1e-15);

    Circuit cascade(2, {Gate::cx(0, 1), Gate::rz(1, kPi), Gate::rz(1, kPi), Gate::cx(0, 1)});
    EXPECT_TRUE(clean(cascade).empty());
    EXPECT_TRUE(same_action(cascade, Circuit(2)));
}

TEST(circuit, clean_keeps_what_does_not_cancel) {
    Circuit c(2, {Gate::cx(0, 1), Gate::cx(1, 0), Gate::sx(0), Gate::sx(0), Gate::rz(1, 0.1)});
    EXPECT_EQ(clean(c), c);

    // A gate on another wire in between does not block cancellation.
    Circuit d(3, {Gate::x(0), Gate::sx(1), Gate::x(0), Gate::cx(2, 1)});
    EXPECT_EQ(clean(d), Circuit(3, {Gate::sx(1), Gate::cx(2, 1)}));

    // But a CX touching the wire does.
    Circuit e(2, {Gate::x(0), Gate::cx(0, 1), Gate::x(0)});
    EXPECT_EQ(clean(e), e);

    auto layout = Circuit(2, {Gate::x(0), Gate::x(0)}, {1, 0});
    EXPECT_EQ(clean(layout).layout(), (std::vector<std::size_t>{1, 0}));
}

TEST(circuit, clean_preserves_action_on_random_circuits) {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.index(4);
        const auto m = coupling::complete(n);
        auto c = random_circuit(n, rng.index(40), m, rng);
        // Bias towards cancellations by duplicating a random slice.
        auto gates = c.gates();
        if (!gates.empty()) {
            const auto at = rng.index(gates.size());
            gates.insert(gates.begin() + static_cast<std::ptrdiff_t>(at), gates[at]);
        }
        c = c.with_gates(gates);
        const auto cleaned = clean(c);
        EXPECT_LE(cost(cleaned), cost(c));
        EXPECT_TRUE(same_action(c, cleaned)) << serialize(c);
        EXPECT_EQ(clean(cleaned), cleaned);
    }
}

TEST(circuit, cnot_upper_bound) {
    EXPECT_EQ(cnot_upper_bound(2), 1u);
    EXPECT_EQ(cnot_upper_bound(3), 3u);
    EXPECT_EQ(cnot_upper_bound(4), 9u);
    EXPECT_EQ(cnot_upper_bound(5), 20u);
    // 61.333 - 16 + 1.667 is exactly 47.
    EXPECT_EQ(cnot_upper_bound(6), 47u);
    EXPECT_THROW(cnot_upper_bound(1), std::domain_error);
    for (std::size_t n = 2; n < 30; ++n) {
        EXPECT_LE(cnot_upper_bound(n), cnot_upper_bound(n + 1)) << n;
    }
}

TEST(circuit, serialize_format) {
    Circuit c(1, {Gate::rz(0, 1.5)});
    EXPECT_EQ(serialize(c), "qubits 1\nlayout 0\nrz 0 1.5\n");
    Circuit d(3, {Gate::cx(2, 0), Gate::x(1), Gate::sx(0)}, {1, 2, 0});
    EXPECT_EQ(serialize(d), "qubits 3\nlayout 1 2 0\ncx 2 0\nx 1\nsx 0\n");
}

TEST(circuit, serialize_round_trip) {
    Rng rng(11);
    const auto m = coupling::falcon_5t();
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_circuit(5, 200, m, rng);
        auto layout = identity_layout(5);
        rng.shuffle(layout);
        c = c.with_layout(layout);
        EXPECT_EQ(deserialize(serialize(c)), c);
    }
}

TEST(circuit, deserialize_errors) {
    EXPECT_THROW(deserialize("qubits 5\ncx 0 7\n"), ParseError);
    try {
        deserialize("qubits 5\nlayout 0 1 2 3 4\nx 0\ncx 0 7\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    EXPECT_THROW(deserialize("qubits 2\nfoo 1\n"), ParseError);
    EXPECT_THROW(deserialize("qubits 2\nrz 0\n"), ParseError);
    EXPECT_THROW(deserialize("qubits 2\nrz 0 abc\n"), ParseError);
    EXPECT_THROW(deserialize("qubits 2\ncx 1 1\n"), ParseError);
    EXPECT_THROW(deserialize("qubits 2\nlayout 0 0\n"), ParseError);
    EXPECT_THROW(deserialize("x 0\n"), ParseError);
    EXPECT_EQ(deserialize("# comment\nqubits 2\n\nx 1  # trailing\n"), Circuit(2, {Gate::x(1)}));
}
