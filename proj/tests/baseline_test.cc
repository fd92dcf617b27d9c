#include "aprep/baseline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aprep/haar.hpp"
#include "aprep/simulator.hpp"
#include "oracle.hpp"

using namespace aprep;

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 product(const std::vector<Gate>& gates) {
    Mat2 m{1.0, 0.0, 0.0, 1.0};
    for (const auto& g : gates) {
        m = matmul(gate_matrix(g), m);
    }
    return m;
}

// |tr(a^dagger b)| / 2, equal to 1 iff a and b agree up to phase.
double phase_overlap(const Mat2& a, const Mat2& b) {
    const auto p = matmul(dagger(a), b);
    return std::abs(p[0] + p[3]) / 2.0;
}

Mat2 random_unitary(Rng& rng) {
    const auto s = sample_haar_state(1, rng);
    const Complex a = s[0], b = s[1];
    const Complex phase = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    return {phase * a, -phase * std::conj(b), phase * b, phase * std::conj(a)};
}

// Routed circuits agree with the original once the input is relabeled by the
// change of layout.
bool same_up_to_layout(const Circuit& original, const Circuit& routed) {
    const std::size_t n = original.n_qubits();
    const auto inv = invert_permutation(routed.layout());
    for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) {
        std::size_t j = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if ((i >> q) & 1) {
                j |= std::size_t{1} << inv[original.layout()[q]];
            }
        }
        const auto a = apply_circuit(original, StateVector::basis(n, i));
        const auto b = apply_circuit(routed, StateVector::basis(n, j));
        if (std::abs(inner(a, b)) < 1.0 - 1e-10) {
            return false;
        }
    }
    return fidelity_pure(prepare(original), prepare(routed)) >= 1.0 - 1e-10;
}

}  // namespace

TEST(su2_to_native, special_cases) {
    EXPECT_TRUE(su2_to_native({1.0, 0.0, 0.0, 1.0}).empty());
    EXPECT_TRUE(su2_to_native({Complex(0.0, 1.0), 0.0, 0.0, Complex(0.0, 1.0)}).empty());
    EXPECT_EQ(su2_to_native({0.0, 1.0, 1.0, 0.0}, 3), std::vector<Gate>{Gate::x(3)});

    const double r = std::sqrt(0.5);
    const Mat2 h{r, r, r, -r};
    const auto seq = su2_to_native(h);
    EXPECT_LE(seq.size(), 5u);
    EXPECT_NEAR(phase_overlap(h, product(seq)), 1.0, 1e-9);

    const auto rz = su2_to_native(gate_matrix(Gate::rz(0, 0.4)));
    ASSERT_EQ(rz.size(), 1u);
    EXPECT_NEAR(rz[0].angle(), 0.4, 1e-12);

    EXPECT_THROW(su2_to_native({1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
}

TEST(su2_to_native, random_unitaries) {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto u = random_unitary(rng);
        const auto seq = su2_to_native(u, 0);
        EXPECT_LE(seq.size(), 5u);
        EXPECT_NEAR(phase_overlap(u, product(seq)), 1.0, 1e-9);
    }
    // Near-diagonal and near-antidiagonal inputs.
    for (double t : {1e-13, 1e-9, kPi - 1e-9, kPi - 1e-13}) {
        const Mat2 u{std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2)};
        EXPECT_NEAR(phase_overlap(u, product(su2_to_native(u))), 1.0, 1e-9);
    }
}

TEST(route, valid_circuit_unchanged) {
    const auto m = coupling::falcon_5t();
    Rng rng(1);
    const auto c = random_circuit(5, 50, m, rng);
    EXPECT_EQ(route(c, m), c);
}

TEST(route, distant_cx_on_falcon) {
    const auto m = coupling::falcon_5t();
    const Circuit c(5, {Gate::cx(0, 4)});
    const auto r = route(c, m);
    EXPECT_TRUE(is_valid(r, m));
    EXPECT_LE(cnot_count(r), 7u);
    EXPECT_TRUE(same_up_to_layout(c, r));
    EXPECT_NE(r.layout(), identity_layout(5));
}

TEST(route, preserves_action) {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(4);
        const auto m = n == 5 && rng.bernoulli(0.5) ? coupling::falcon_5t() : coupling::line(n);
        auto c = random_circuit(n, 30, coupling::complete(n), rng);
        auto layout = identity_layout(n);
        rng.shuffle(layout);
        c = c.with_layout(layout);
        const auto r = route(c, m);
        EXPECT_TRUE(is_valid(r, m));
        EXPECT_TRUE(same_up_to_layout(c, r));
        EXPECT_LE(cnot_count(r), cnot_count(c) * (1 + 3 * (n - 2)));
    }
}

TEST(route, errors) {
    EXPECT_THROW(route(Circuit(4, {Gate::cx(0, 3)}), CouplingMap(4, {{0, 1}, {2, 3}})), std::domain_error);
    EXPECT_THROW(route(Circuit(3), coupling::line(4)), std::invalid_argument);
}

TEST(multiplexed_rotation, matches_block_diagonal) {
    Rng rng(8);
    for (auto axis : {RotationAxis::Y, RotationAxis::Z}) {
        for (std::size_t k = 0; k <= 3; ++k) {
            const std::size_t n = k + 1;
            std::vector<std::size_t> controls;
            for (std::size_t q = 1; q <= k; ++q) {
                controls.push_back(q);
            }
            std::vector<double> angles(std::size_t{1} << k);
            for (auto& a : angles) {
                a = rng.uniform(-kPi, kPi);
            }
            const Circuit c(n, multiplexed_rotation(axis, 0, controls, angles));
            EXPECT_EQ(cnot_count(c), k == 0 ? 0u : (std::size_t{1} << k));
            const auto u = oracle::circuit_unitary(c);
            // Block j acts on qubit 0 when the controls read j.
            for (std::size_t j = 0; j < angles.size(); ++j) {
                const double h = angles[j] / 2;
                Eigen::Matrix2cd expected;
                if (axis == RotationAxis::Y) {
                    expected << std::cos(h), -std::sin(h), std::sin(h), std::cos(h);
                } else {
                    expected << std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h);
                }
                const Eigen::Matrix2cd block = u.block(static_cast<Eigen::Index>(2 * j), static_cast<Eigen::Index>(2 * j), 2, 2);
                // Global phase of the whole circuit is shared by all blocks.
                const Complex phase = (expected.adjoint() * block).trace() / 2.0;
                EXPECT_NEAR(std::abs(phase), 1.0, 1e-10);
                if (j == 0) {
                    continue;
                }
                const Eigen::Matrix2cd first = u.block(0, 0, 2, 2);
                Eigen::Matrix2cd e0;
                const double h0 = angles[0] / 2;
                if (axis == RotationAxis::Y) {
                    e0 << std::cos(h0), -std::sin(h0), std::sin(h0), std::cos(h0);
                } else {
                    e0 << std::polar(1.0, -h0), 0.0, 0.0, std::polar(1.0, h0);
                }
                EXPECT_NEAR(std::abs(phase - (e0.adjoint() * first).trace() / 2.0), 0.0, 1e-10);
            }
        }
    }
    EXPECT_THROW(multiplexed_rotation(RotationAxis::Y, 0, {1}, {0.1}), std::invalid_argument);
}

TEST(multiplexed_prepare, prepares_targets) {
    Rng rng(10);
    for (std::size_t n = 1; n <= 7; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto t = sample_haar_state(n, rng);
            const auto c = multiplexed_prepare(t);
            EXPECT_GE(fidelity_pure(prepare(c), t), 1.0 - 1e-10) << n;
        }
    }
    // Sparse targets with zero amplitudes.
    const auto ghz = StateVector(3, {std::sqrt(0.5), 0, 0, 0, 0, 0, 0, std::sqrt(0.5)});
    EXPECT_GE(fidelity_pure(prepare(multiplexed_prepare(ghz)), ghz), 1.0 - 1e-12);
}

TEST(chain_skeleton, counts) {
    EXPECT_TRUE(chain_skeleton(1).empty());
    EXPECT_EQ(chain_skeleton(2).size(), 1u);
    EXPECT_EQ(chain_skeleton(3), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {0, 1}}));
    EXPECT_EQ(chain_skeleton(4).size(), 9u);
    EXPECT_EQ(chain_skeleton(5).size(), 20u);
}

TEST(exact_prepare, trivial_targets) {
    const auto z = exact_prepare(StateVector(4), coupling::line(4));
    EXPECT_EQ(cnot_count(z), 0u);
    EXPECT_GE(fidelity_pure(prepare(z), StateVector(4)), 1.0 - 1e-12);

    const auto b = StateVector::basis(3, 5);
    EXPECT_GE(fidelity_pure(prepare(exact_prepare(b, coupling::line(3))), b), 1.0 - 1e-10);

    const auto one = StateVector(1, {std::sqrt(0.3), Complex(0.0, std::sqrt(0.7))});
    EXPECT_GE(fidelity_pure(prepare(exact_prepare(one, CouplingMap(1, {}))), one), 1.0 - 1e-12);
}

TEST(exact_prepare, errors) {
    Rng rng(1);
    EXPECT_THROW(exact_prepare(sample_haar_state(3, rng), coupling::line(4)), std::invalid_argument);
    EXPECT_THROW(exact_prepare(sample_haar_state(11, rng), coupling::line(11)), std::invalid_argument);
}

TEST(exact_prepare, haar_targets_complete_graph) {
    Rng rng(2);
    for (std::size_t n = 2; n <= 5; ++n) {
        const auto m = coupling::complete(n);
        for (int trial = 0; trial < (n == 5 ? 10 : 30); ++trial) {
            const auto t = sample_haar_state(n, rng);
            const auto c = exact_prepare(t, m);
            EXPECT_GE(fidelity_pure(prepare(c), t), 1.0 - 1e-8);
            EXPECT_LE(cnot_count(c), cnot_upper_bound(n));
            EXPECT_TRUE(is_valid(c, m));
        }
    }
}

TEST(exact_prepare, haar_targets_restricted) {
    Rng rng(3);
    const auto falcon = coupling::falcon_5t();
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = sample_haar_state(5, rng);
        const auto c = exact_prepare(t, falcon);
        EXPECT_GE(fidelity_pure(prepare(c), t), 1.0 - 1e-8);
        EXPECT_TRUE(is_valid(c, falcon));
        EXPECT_LE(static_cast<double>(cnot_count(c)), 20 * 5.8);
    }
    for (std::size_t n : {6, 7}) {
        const auto t = sample_haar_state(n, rng);
        const auto c = exact_prepare(t, coupling::line(n));
        EXPECT_GE(fidelity_pure(prepare(c), t), 1.0 - 1e-8);
        EXPECT_TRUE(is_valid(c, coupling::line(n)));
    }
}

TEST(exact_prepare, deterministic) {
    Rng rng(4);
    const auto t = sample_haar_state(4, rng);
    EXPECT_EQ(serialize(exact_prepare(t, coupling::line(4))), serialize(exact_prepare(t, coupling::line(4))));
}

TEST(exact_prepare, deep_exact_circuit_loses_to_short_approximation) {
    // Five qubits: the multiplexed construction routed onto the T-shaped map
    // needs well over a hundred CX, while a ten-CX fit already captures most
    // of the state.
    Rng rng(5);
    const auto m = coupling::falcon_5t();
    const auto t = sample_haar_state(5, rng);
    const auto deep = clean(route(clean(multiplexed_prepare(t)), m));
    ASSERT_GE(cnot_count(deep), 100u);
    ASSERT_GE(fidelity_pure(prepare(deep), t), 1.0 - 1e-8);

    auto skeleton = chain_skeleton(5);
    skeleton.resize(8);  // (0,1), (1,2), (2,3), (3,4) twice
    const auto approx = route(fit_skeleton(t, skeleton, 8).circuit, m);
    ASSERT_LE(cnot_count(approx), 30u);

    const NoiseModel noise;
    EXPECT_LT(noisy_fidelity(deep, t, noise), noisy_fidelity(approx, t, noise));
}

TEST(approximate_family, fidelity_grows_with_cx_budget) {
    Rng rng(6);
    const auto m = coupling::line(4);
    const auto t = sample_haar_state(4, rng);
    const auto family = approximate_family(t, m);
    ASSERT_EQ(family.size(), cnot_upper_bound(4));
    for (std::size_t k = 0; k < family.size(); ++k) {
        EXPECT_EQ(cnot_count(family[k]), k);
        EXPECT_TRUE(is_valid(family[k], m));
    }
    // Fits are local optima, so allow small dips, but the trend is upward and
    // the product-state fit is far from exact.
    EXPECT_LT(fidelity_pure(prepare(family[0]), t), 0.9);
    EXPECT_GT(fidelity_pure(prepare(family.back()), t), 0.999);
    EXPECT_TRUE(approximate_family(sample_haar_state(6, rng), coupling::line(6)).empty());
}
