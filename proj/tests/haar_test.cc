#include "aprep/haar.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "aprep/simulator.hpp"

using namespace aprep;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(haar, deterministic_per_seed) {
    Rng a(42), b(42), c(43);
    const auto sa = sample_haar_state(4, a);
    const auto sb = sample_haar_state(4, b);
    const auto sc = sample_haar_state(4, c);
    EXPECT_EQ(format_state(sa), format_state(sb));
    EXPECT_NE(format_state(sa), format_state(sc));
}

TEST(haar, regression_first_amplitude) {
    // Pins the generator and the sampling order across platforms.
    Rng rng(1);
    const auto s = sample_haar_state(2, rng);
    const auto again = [] {
        Rng r(1);
        std::array<double, 8> g{};
        for (auto& x : g) x = r.normal();
        double norm = 0.0;
        for (auto x : g) norm += x * x;
        return Complex(g[0], g[1]) / std::sqrt(norm);
    }();
    EXPECT_NEAR(std::abs(s[0] - again), 0.0, 1e-15);
}

TEST(haar, range_and_norm) {
    Rng rng(0);
    EXPECT_THROW(sample_haar_state(0, rng), std::invalid_argument);
    EXPECT_THROW(sample_haar_state(13, rng), std::invalid_argument);
    for (int i = 0; i < 200; ++i) {
        EXPECT_NEAR(sample_haar_state(1 + rng.index(8), rng).norm(), 1.0, 1e-12);
    }
}

TEST(haar, mean_overlap) {
    Rng rng(77);
    const int pairs = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double f = fidelity_pure(sample_haar_state(5, rng), sample_haar_state(5, rng));
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / pairs;
    const double sd = std::sqrt((sum2 / pairs - mean * mean) / pairs);
    EXPECT_NEAR(mean, 1.0 / 32.0, 3.0 * sd);
}

TEST(haar, invariance_under_fixed_unitary) {
    Rng rng(100);
    const auto u = random_circuit(3, 60, coupling::complete(3), rng);
    std::vector<double> plain, rotated;
    for (int i = 0; i < 5000; ++i) {
        plain.push_back(std::norm(sample_haar_state(3, rng)[5]));
        rotated.push_back(std::norm(apply_circuit(u, sample_haar_state(3, rng))[5]));
    }
    // Critical value for p = 0.01 with two samples of 5000.
    const double critical = 1.628 * std::sqrt(2.0 / 5000.0);
    EXPECT_LT(ks_statistic(plain, rotated), critical);
}

TEST(haar, random_circuit_properties) {
    Rng rng(5);
    const auto m = coupling::falcon_5t();
    EXPECT_TRUE(random_circuit(5, 0, m, rng).empty());
    const auto c = random_circuit(5, 10000, m, rng);
    EXPECT_EQ(c.size(), 10000u);
    EXPECT_TRUE(is_valid(c, m));
    EXPECT_EQ(c.layout(), identity_layout(5));
    for (const auto& g : c.gates()) {
        if (g.kind() == GateKind::RZ) {
            EXPECT_GE(g.angle(), 0.0);
            EXPECT_LT(g.angle(), kTwoPi);
        }
    }
    EXPECT_THROW(random_circuit(4, 3, m, rng), std::invalid_argument);
}

TEST(haar, random_cx_respects_layout) {
    Rng rng(6);
    const auto m = coupling::falcon_5t();
    const std::vector<std::size_t> layout{4, 3, 2, 1, 0};
    for (int i = 0; i < 500; ++i) {
        const Circuit c(5, {random_cx(m, layout, rng)}, layout);
        EXPECT_TRUE(is_valid(c, m));
    }
}

TEST(haar, gate_kind_histogram_uniform) {
    Rng rng(31);
    const auto m = coupling::falcon_5t();
    const auto layout = identity_layout(5);
    std::array<double, 4> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        counts[static_cast<std::size_t>(random_gate(m, layout, rng).kind())] += 1.0;
    }
    double chi2 = 0.0;
    for (auto k : counts) {
        chi2 += (k - draws / 4.0) * (k - draws / 4.0) / (draws / 4.0);
    }
    // 99.9% quantile of chi-squared with 3 degrees of freedom.
    EXPECT_LT(chi2, 16.27);

    // Without edges only single-qubit gates are drawn.
    const CouplingMap lonely(1, {});
    for (int i = 0; i < 100; ++i) {
        EXPECT_NE(random_gate(lonely, identity_layout(1), rng).kind(), GateKind::CX);
    }
}
