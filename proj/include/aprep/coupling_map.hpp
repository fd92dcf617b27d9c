#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aprep/circuit.hpp"

namespace aprep {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected connectivity graph of physical qubits. Edges are stored as
/// (low, high) pairs in sorted order without duplicates.
class CouplingMap {
public:
    CouplingMap(std::size_t n_qubits, std::vector<Edge> edges);

    std::size_t n_qubits() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool adjacent(std::size_t a, std::size_t b) const;
    bool connected() const { return connected_; }

    /// Shortest-path distance between physical qubits; throws if unreachable.
    std::size_t distance(std::size_t a, std::size_t b) const;
    /// Vertices of a shortest path from a to b, inclusive.
    std::vector<std::size_t> shortest_path(std::size_t a, std::size_t b) const;

    friend bool operator==(const CouplingMap& a, const CouplingMap& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::vector<std::size_t> dist_;  // n*n, kUnreachable when disconnected
    bool connected_ = false;
};

namespace coupling {

/// IBM Falcon 5T T-shape: edges {0-1, 1-2, 1-3, 3-4}. The edge list is
/// reconstructed from its average qubit distance of 1.8.
CouplingMap falcon_5t();
CouplingMap line(std::size_t n);
CouplingMap ring(std::size_t n);
CouplingMap complete(std::size_t n);

/// Subgraph induced by `vertices`, relabeled 0..k-1 in the given order.
CouplingMap induced(const CouplingMap& m, const std::vector<std::size_t>& vertices);

/// Named preset: "falcon-5t", "falcon-5t-line4", "line-<n>", "ring-<n>",
/// "complete-<n>".
CouplingMap preset(std::string_view name);

/// Preset name or path to a file in coupling-map text format.
CouplingMap load(const std::string& preset_or_path);

/// Format: header "qubits <n>" then one "<a> <b>" edge per line.
CouplingMap parse(std::string_view text);
std::string format(const CouplingMap& m);

}  // namespace coupling

/// Mean shortest-path length over unordered qubit pairs. Throws on a
/// disconnected graph.
double average_distance(const CouplingMap& m);

struct LphBounds {
    double lower;
    double upper;
};

/// Physical CNOTs per logical CNOT: at least the mean distance, at most
/// 1 + 6(<d> - 1) when distant pairs are swapped together and back.
LphBounds lph_bounds(const CouplingMap& m);

struct Violation {
    std::size_t gate_index;
    std::string reason;
};

/// Empty when every CX, mapped through the layout, lies on an edge of `m` and
/// all indices are in range.
std::vector<Violation> validate(const Circuit& c, const CouplingMap& m);

inline bool is_valid(const Circuit& c, const CouplingMap& m) { return validate(c, m).empty(); }

}  // namespace aprep
