#pragma once

#include <cstddef>
#include <span>

#include "aprep/circuit.hpp"
#include "aprep/coupling_map.hpp"
#include "aprep/rng.hpp"
#include "aprep/state.hpp"

namespace aprep {

/// Haar-random pure state: 2^n i.i.d. standard complex Gaussians, normalized.
StateVector sample_haar_state(std::size_t n, Rng& rng);

/// One gate with a uniformly chosen kind. Single-qubit gates pick a uniform
/// logical qubit and RZ a uniform angle in [0, 2pi); CX picks a uniform edge of
/// `m` in a random direction and maps it back through `layout`. On a map
/// without edges only single-qubit kinds are drawn.
Gate random_gate(const CouplingMap& m, std::span<const std::size_t> layout, Rng& rng);

/// CX on a uniform coupling edge with random direction, in logical labels.
Gate random_cx(const CouplingMap& m, std::span<const std::size_t> layout, Rng& rng);

/// `length` random gates with the identity layout; always valid on `m`.
Circuit random_circuit(std::size_t n, std::size_t length, const CouplingMap& m, Rng& rng);

}  // namespace aprep
