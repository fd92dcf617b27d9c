#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aprep {

/// Native gate set of IBM transmon processors.
enum class GateKind : std::uint8_t { RZ, X, SX, CX };

std::string_view gate_name(GateKind kind);

constexpr std::size_t arity(GateKind kind) { return kind == GateKind::CX ? 2 : 1; }

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Angle reduced into [0, 2*pi).
double normalize_angle(double theta);

/// True when theta is a multiple of 2*pi within `tol`.
bool angle_is_zero(double theta, double tol = 1e-12);

/// One native gate application. Qubit indices are logical; for CX the order is
/// (control, target). The angle is meaningful only for RZ and is kept in [0, 2*pi).
class Gate {
public:
    static Gate rz(std::size_t qubit, double theta);
    static Gate x(std::size_t qubit);
    static Gate sx(std::size_t qubit);
    static Gate cx(std::size_t control, std::size_t target);

    GateKind kind() const { return kind_; }
    std::size_t arity() const { return aprep::arity(kind_); }
    std::span<const std::size_t> qubits() const { return {qubits_.data(), arity()}; }
    std::size_t qubit(std::size_t i) const { return qubits_[i]; }
    std::size_t control() const { return qubits_[0]; }
    std::size_t target() const { return qubits_[1]; }
    /// Present exactly when kind() == RZ.
    std::optional<double> param() const;
    double angle() const { return angle_; }
    bool acts_on(std::size_t q) const;
    bool is_single_qubit() const { return kind_ != GateKind::CX; }

    /// Same gate with its qubit labels passed through `map`.
    template <typename F>
    Gate relabeled(F&& map) const {
        Gate g = *this;
        for (std::size_t i = 0; i < arity(); ++i) {
            g.qubits_[i] = map(qubits_[i]);
        }
        return g;
    }

    friend bool operator==(const Gate& a, const Gate& b);

private:
    Gate(GateKind kind, std::size_t q0, std::size_t q1, double angle)
        : kind_(kind), qubits_{q0, q1}, angle_(angle) {}

    GateKind kind_;
    std::array<std::size_t, 2> qubits_;
    double angle_;
};

/// Native-gate sequence that undoes `g`, up to global phase. SX has no native
/// inverse and is undone by RZ(pi) SX RZ(pi).
std::vector<Gate> inverse_of(const Gate& g);

/// Gate list plus a logical -> physical qubit layout.
///
/// Circuits are immutable values: every transformation returns a new circuit.
/// Construction checks that gate indices are distinct and in range and that the
/// layout is a permutation of {0..n-1}. Connectivity is not part of the value;
/// it is checked against a coupling map by validate().
class Circuit {
public:
    explicit Circuit(std::size_t n_qubits);
    Circuit(std::size_t n_qubits, std::vector<Gate> gates);
    Circuit(std::size_t n_qubits, std::vector<Gate> gates, std::vector<std::size_t> layout);

    std::size_t n_qubits() const { return n_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<std::size_t>& layout() const { return layout_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }
    const Gate& operator[](std::size_t i) const { return gates_[i]; }

    Circuit with_gates(std::vector<Gate> gates) const;
    Circuit with_layout(std::vector<std::size_t> layout) const;

    friend bool operator==(const Circuit& a, const Circuit& b) = default;

private:
    std::size_t n_qubits_;
    std::vector<Gate> gates_;
    std::vector<std::size_t> layout_;
};

std::vector<std::size_t> identity_layout(std::size_t n);
std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm);
bool is_permutation(std::span<const std::size_t> perm);

/// Single-qubit gate count plus ten times the CX count.
std::size_t cost(const Circuit& c);
std::size_t cnot_count(const Circuit& c);
std::size_t single_qubit_count(const Circuit& c);

/// Peephole simplification to a fixed point: cancels adjacent inverse pairs on
/// the same wires (X X, CX CX) and merges consecutive RZ on a qubit, dropping
/// rotations that reduce to the identity. The action on every input state is
/// unchanged up to global phase and cost never increases.
Circuit clean(const Circuit& c);

/// Upper bound on the CX count for exact preparation of an arbitrary n-qubit
/// state with all-to-all connectivity. Small cases n = 2, 3, 4 use the known
/// exact counts 1, 3, 9.
std::size_t cnot_upper_bound(std::size_t n);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Text format:
///   qubits <n>
///   layout <p0> ... <p_{n-1}>
///   rz <q> <theta> | x <q> | sx <q> | cx <control> <target>
/// Angles carry 17 significant digits so that parsing is exact.
std::string serialize(const Circuit& c);
Circuit deserialize(std::string_view text);

}  // namespace aprep
