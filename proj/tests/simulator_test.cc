#include "aprep/simulator.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "aprep/coupling_map.hpp"
#include "aprep/haar.hpp"
#include "oracle.hpp"

using namespace aprep;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd to_matrix(const DensityMatrix& rho) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = rho(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    return m;
}

}  // namespace

TEST(simulator, basic_actions) {
    EXPECT_EQ(prepare(Circuit(2))[0], Complex(1.0));

    const auto one = prepare(Circuit(1, {Gate::sx(0), Gate::sx(0)}));
    EXPECT_NEAR(std::abs(one[1]), 1.0, 1e-15);

    const auto bell = prepare(Circuit(2, {Gate::rz(0, kPi / 2), Gate::sx(0), Gate::rz(0, kPi / 2), Gate::cx(0, 1)}));
    const StateVector expected(2, {std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5)});
    EXPECT_NEAR(fidelity_pure(bell, expected), 1.0, 1e-14);

    EXPECT_THROW(apply_circuit(Circuit(2), StateVector(3)), std::invalid_argument);
}

TEST(simulator, gate_matrices) {
    EXPECT_EQ(gate_matrix(Gate::x(0)), (Mat2{0.0, 1.0, 1.0, 0.0}));
    const auto sx = gate_matrix(Gate::sx(0));
    const auto x = matmul(sx, sx);
    EXPECT_NEAR(std::abs(x[1] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x[0]), 0.0, 1e-15);
    const auto rz = gate_matrix(Gate::rz(0, 0.7));
    EXPECT_NEAR(std::abs(rz[0] - std::polar(1.0, -0.35)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(rz[3] - std::polar(1.0, 0.35)), 0.0, 1e-15);
}

TEST(simulator, matches_kronecker_oracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.index(4);
        const auto c = random_circuit(n, rng.index(21), coupling::complete(n), rng);
        const auto u = oracle::circuit_unitary(c);
        const auto input = sample_haar_state(n, rng);
        const Eigen::VectorXcd expected = u * oracle::to_eigen(input);
        EXPECT_GE(oracle::overlap(expected, apply_circuit(c, input)), 1.0 - 1e-10) << serialize(c);
    }
}

TEST(simulator, norm_preserved_on_long_circuits) {
    Rng rng(9);
    const auto c = random_circuit(5, 10000, coupling::falcon_5t(), rng);
    EXPECT_NEAR(prepare(c).norm(), 1.0, 1e-10);
}

TEST(simulator, noisy_basic) {
    const auto rho = apply_noisy(Circuit(3), NoiseModel());
    EXPECT_EQ(rho(0, 0), Complex(1.0));
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-15);

    const auto flipped = apply_noisy(Circuit(3, {Gate::x(0)}), NoiseModel(0.0, 0.1));
    EXPECT_NEAR(flipped(1, 1).real(), 1.0, 1e-15);

    EXPECT_DOUBLE_EQ(noisy_fidelity(Circuit(2), StateVector(2), NoiseModel()), 1.0);
    EXPECT_THROW(NoiseModel(-0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(NoiseModel(0.0, 1.5), std::invalid_argument);
}

TEST(simulator, single_qubit_depolarizing_oracle) {
    // X then depolarizing on qubit 0 of |00>: the flipped qubit survives with
    // probability 1 - p and is otherwise replaced by I/2.
    const double p = 0.3;
    const auto f = noisy_fidelity(Circuit(2, {Gate::x(0)}), StateVector::basis(2, 1), NoiseModel(p, 0.0));
    EXPECT_NEAR(f, 1.0 - p / 2.0, 1e-14);
}

TEST(simulator, identity_cx_decay_oracle) {
    // On two qubits the channel is rho -> (1-p) rho + p I/4, so l rounds give
    // F = 1/4 + 3/4 (1-p)^l exactly.
    for (double p : {0.0088, 0.05, 0.2}) {
        for (std::size_t l : {1, 5, 20}) {
            std::vector<Gate> gates(l, Gate::cx(0, 1));
            const auto f = noisy_fidelity(Circuit(2, gates), StateVector(2), NoiseModel(0.0, p));
            EXPECT_NEAR(f, 0.25 + 0.75 * std::pow(1.0 - p, static_cast<double>(l)), 1e-13);
        }
    }
    // On a wider register the untouched qubits stay pure.
    std::vector<Gate> gates(10, Gate::cx(1, 2));
    const auto f = noisy_fidelity(Circuit(4, gates), StateVector(4), NoiseModel(0.0, 0.05));
    EXPECT_NEAR(f, 0.25 + 0.75 * std::pow(0.95, 10.0), 1e-13);
}

TEST(simulator, noiseless_density_matches_pure) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.index(4);
        const auto c = random_circuit(n, 30, coupling::complete(n), rng);
        const auto psi = prepare(c);
        const auto rho = to_matrix(apply_noisy(c, NoiseModel::noiseless()));
        const auto v = oracle::to_eigen(psi);
        const Eigen::MatrixXcd pure = v * v.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho - pure);
        EXPECT_LT(0.5 * eig.eigenvalues().cwiseAbs().sum(), 1e-9);

        const auto target = sample_haar_state(n, rng);
        EXPECT_NEAR(noisy_fidelity(c, target, NoiseModel::noiseless()), fidelity_pure(target, psi), 1e-12);
    }
}

TEST(simulator, density_matrix_is_a_state) {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.index(4);
        const auto c = random_circuit(n, 40, coupling::complete(n), rng);
        const NoiseModel noise(rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.5));
        const auto rho = to_matrix(apply_noisy(c, noise));
        EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-9);
        EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
    }
}

TEST(simulator, fidelity_nonincreasing_in_p2) {
    Rng rng(12);
    const auto m = coupling::falcon_5t();
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_circuit(5, 20, m, rng);
        // Use the noiseless output as target so that noise can only hurt.
        const auto target = prepare(c);
        double last = 2.0;
        for (double p2 : {0.0, 0.001, 0.01, 0.05, 0.2}) {
            const double f = noisy_fidelity(c, target, NoiseModel(0.00088, p2));
            EXPECT_LE(f, last + 1e-12);
            last = f;
        }
    }
}

TEST(simulator, predicted_noisy_fidelity) {
    EXPECT_DOUBLE_EQ(predicted_noisy_fidelity(1.0, 0, 0.3), 1.0);
    EXPECT_NEAR(predicted_noisy_fidelity(1.0, 67, 0.01), 0.509986, 1e-6);
    EXPECT_DOUBLE_EQ(predicted_noisy_fidelity(0.5, 10, 0.0), 0.5);
}
