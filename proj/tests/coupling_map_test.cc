#include "aprep/coupling_map.hpp"

#include <gtest/gtest.h>

#include "aprep/rng.hpp"

using namespace aprep;

TEST(coupling_map, falcon_5t) {
    const auto m = coupling::falcon_5t();
    EXPECT_EQ(m.n_qubits(), 5u);
    EXPECT_EQ(m.edges(), (std::vector<Edge>{{0, 1}, {1, 2}, {1, 3}, {3, 4}}));
    EXPECT_DOUBLE_EQ(average_distance(m), 1.8);
    const auto b = lph_bounds(m);
    EXPECT_DOUBLE_EQ(b.lower, 1.8);
    EXPECT_DOUBLE_EQ(b.upper, 5.8);
    EXPECT_EQ(m.distance(0, 4), 3u);
    EXPECT_EQ(m.shortest_path(0, 4), (std::vector<std::size_t>{0, 1, 3, 4}));
    EXPECT_EQ(coupling::preset("falcon-5t"), m);
}

TEST(coupling_map, line_subgraph) {
    const auto m = coupling::preset("falcon-5t-line4");
    EXPECT_EQ(m, coupling::line(4));
    EXPECT_NEAR(average_distance(m), 5.0 / 3.0, 1e-15);
    EXPECT_NEAR(lph_bounds(m).upper, 5.0, 1e-12);
}

TEST(coupling_map, line_and_complete) {
    const auto line = coupling::line(10);
    EXPECT_NEAR(average_distance(line), 3.6667, 1e-4);
    EXPECT_NEAR(lph_bounds(line).lower, 3.6667, 1e-4);
    EXPECT_NEAR(lph_bounds(line).upper, 17.0, 1e-12);
    for (std::size_t n = 2; n < 8; ++n) {
        const auto k = coupling::complete(n);
        EXPECT_EQ(average_distance(k), 1.0);
        EXPECT_EQ(lph_bounds(k).lower, 1.0);
        EXPECT_EQ(lph_bounds(k).upper, 1.0);
    }
}

TEST(coupling_map, bounds_ordered_and_tight_only_on_complete) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(6);
        std::vector<Edge> edges;
        // Random spanning tree plus extra edges keeps the graph connected.
        for (std::size_t v = 1; v < n; ++v) {
            edges.emplace_back(rng.index(v), v);
        }
        for (std::size_t k = rng.index(n * n); k > 0; --k) {
            const auto a = rng.index(n);
            const auto b = rng.index(n);
            if (a != b) {
                edges.emplace_back(a, b);
            }
        }
        const CouplingMap m(n, edges);
        const auto b = lph_bounds(m);
        const bool complete = m.edges().size() == n * (n - 1) / 2;
        EXPECT_LE(b.lower, b.upper);
        EXPECT_EQ(b.lower == b.upper, complete);

        // Relabeling the vertices leaves the mean distance unchanged.
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) {
            perm[i] = i;
        }
        rng.shuffle(perm);
        std::vector<Edge> relabeled;
        for (auto [x, y] : m.edges()) {
            relabeled.emplace_back(perm[x], perm[y]);
        }
        EXPECT_NEAR(average_distance(CouplingMap(n, relabeled)), average_distance(m), 1e-12);
    }
}

TEST(coupling_map, errors) {
    EXPECT_THROW(CouplingMap(3, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(CouplingMap(3, {{0, 3}}), std::invalid_argument);
    const CouplingMap split(4, {{0, 1}, {2, 3}});
    EXPECT_FALSE(split.connected());
    EXPECT_THROW(average_distance(split), std::domain_error);
    EXPECT_THROW(split.distance(0, 3), std::domain_error);
    EXPECT_THROW(coupling::preset("nope"), std::invalid_argument);
}

TEST(coupling_map, text_round_trip) {
    const auto m = coupling::falcon_5t();
    EXPECT_EQ(coupling::parse(coupling::format(m)), m);
    EXPECT_EQ(coupling::parse("qubits 3\n0 1\n# c\n2 1\n"), coupling::line(3));
    EXPECT_THROW(coupling::parse("qubits 3\n0 5\n"), ParseError);
}

TEST(coupling_map, validate) {
    const auto m = coupling::falcon_5t();
    Circuit bad(5, {Gate::x(2), Gate::cx(0, 4)});
    auto v = validate(bad, m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].gate_index, 1u);

    EXPECT_TRUE(is_valid(Circuit(5, {Gate::cx(0, 1)}), m));
    // Logical 4 placed on physical 1 makes the pair physical 0-1.
    EXPECT_TRUE(is_valid(Circuit(5, {Gate::cx(0, 4)}, {0, 4, 2, 3, 1}), m));
    EXPECT_FALSE(validate(Circuit(3, {}), m).empty());
}
