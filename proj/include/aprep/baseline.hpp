#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "aprep/circuit.hpp"
#include "aprep/coupling_map.hpp"
#include "aprep/state.hpp"

namespace aprep {

/// Native gates on `qubit` whose product equals `u` up to global phase:
/// RZ(lambda) SX RZ(theta + pi) SX RZ(phi + pi) in circuit order, shortened to
/// nothing for the identity, one RZ for diagonal u and RZ, X for anti-diagonal
/// u. Throws if `u` is not unitary within 1e-10.
std::vector<Gate> su2_to_native(const Mat2& u, std::size_t qubit = 0);

/// Greedy SWAP routing. Each CX on non-adjacent physical qubits first moves
/// the control along a shortest coupling path until it neighbors the target;
/// every SWAP is emitted as three CX. SWAPs are not undone: the final
/// placement becomes the layout of the result and wires are renamed after the
/// logical qubit they end up holding. The result therefore prepares exactly
/// the same state from |0...0>; on other inputs it equals `c` preceded by the
/// relabeling q -> result.layout()^-1[c.layout()[q]].
Circuit route(const Circuit& c, const CouplingMap& m);

/// Uniformly controlled rotation: angle[k] is applied to `target` when the
/// controls read k (controls[0] is the least significant bit of k). Emitted
/// as 2^|controls| rotations and CX gates.
enum class RotationAxis { Y, Z };
std::vector<Gate> multiplexed_rotation(RotationAxis axis, std::size_t target, const std::vector<std::size_t>& controls,
                                       const std::vector<double>& angles);

/// Amplitude-encoding construction: a tree of uniformly controlled RY for the
/// magnitudes followed by uniformly controlled RZ for the phases. All-to-all
/// connectivity, identity layout, not cleaned. About 2^{n+1} CX.
Circuit multiplexed_prepare(const StateVector& target);

/// CX pairs of the fixed skeleton used for 2 <= n <= 5: the chain
/// (0,1), (1,2), ..., (n-2,n-1) repeated until cnot_upper_bound(n) pairs.
std::vector<std::pair<std::size_t, std::size_t>> chain_skeleton(std::size_t n);

struct SkeletonFit {
    Circuit circuit;
    double infidelity;
    std::size_t restarts;
};

/// Fits generic single-qubit unitaries around the CX pairs of `skeleton` so
/// that the circuit maps |0...0> to `target`, using Levenberg-Marquardt on
/// the amplitude residual. Restarts come from a fixed seed, so the result is a
/// deterministic function of the inputs.
SkeletonFit fit_skeleton(const StateVector& target, const std::vector<std::pair<std::size_t, std::size_t>>& skeleton,
                         std::size_t max_restarts = 24);

/// Exact state preparation valid on `m`, with noiseless fidelity >= 1 - 1e-8.
/// For 2 <= n <= 5 the CX structure is chain_skeleton(n), so the logical CX
/// count is cnot_upper_bound(n) before routing. Other sizes, and targets the
/// fit cannot solve, use multiplexed_prepare. The result is routed onto `m`
/// and cleaned.
Circuit exact_prepare(const StateVector& target, const CouplingMap& m);

/// Approximate companions of exact_prepare for 2 <= n <= 5: for every
/// k < cnot_upper_bound(n), the best fit of the first k pairs of
/// chain_skeleton(n), routed onto `m` and cleaned. Index k holds the k-pair
/// fit. Empty for other sizes.
std::vector<Circuit> approximate_family(const StateVector& target, const CouplingMap& m, std::size_t restarts = 8);

}  // namespace aprep
