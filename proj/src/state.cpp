#include "aprep/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace aprep {

namespace {

std::size_t checked_dim(std::size_t n) {
    if (n == 0 || n > 30) {
        throw std::invalid_argument("state: qubit count out of range");
    }
    return std::size_t{1} << n;
}

}  // namespace

StateVector::StateVector(std::size_t n_qubits) : n_(n_qubits), amps_(checked_dim(n_qubits)) { amps_[0] = 1.0; }

StateVector::StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_(n_qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != checked_dim(n_)) {
        throw std::invalid_argument("state: expected " + std::to_string(checked_dim(n_)) + " amplitudes, got " +
                                    std::to_string(amps_.size()));
    }
    if (std::abs(norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("state: amplitudes are not normalized");
    }
}

StateVector StateVector::normalized(std::size_t n_qubits, std::vector<Complex> amplitudes) {
    if (amplitudes.size() != checked_dim(n_qubits)) {
        throw std::invalid_argument("state: amplitude count does not match qubit count");
    }
    double sq = 0.0;
    for (const auto& a : amplitudes) {
        sq += std::norm(a);
    }
    if (!(sq > 0.0) || !std::isfinite(sq)) {
        throw std::invalid_argument("state: cannot normalize a zero vector");
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& a : amplitudes) {
        a *= inv;
    }
    return {Unchecked{}, n_qubits, std::move(amplitudes)};
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    std::vector<Complex> amps(checked_dim(n_qubits));
    amps.at(index) = 1.0;
    return {Unchecked{}, n_qubits, std::move(amps)};
}

double StateVector::norm() const {
    double sq = 0.0;
    for (const auto& a : amps_) {
        sq += std::norm(a);
    }
    return std::sqrt(sq);
}

Complex inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner: dimension mismatch");
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double fidelity_pure(const StateVector& a, const StateVector& b) { return std::min(1.0, std::norm(inner(a, b))); }

double fubini_study_distance(const StateVector& a, const StateVector& b) {
    return std::acos(std::clamp(std::abs(inner(a, b)), 0.0, 1.0));
}

std::string format_state(const StateVector& s) {
    std::string out = "qubits " + std::to_string(s.n_qubits()) + "\n";
    char buf[96];
    for (const auto& a : s.amplitudes()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a.real(), a.imag());
        out += buf;
    }
    return out;
}

StateVector parse_state(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::size_t n = 0;
    std::vector<Complex> amps;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream words(line);
        std::string first;
        if (!(words >> first)) {
            continue;
        }
        if (first == "qubits") {
            if (n != 0 || !(words >> n) || n == 0 || n > 30) {
                throw ParseError(line_no, "bad 'qubits' header");
            }
            continue;
        }
        if (n == 0) {
            throw ParseError(line_no, "amplitude before 'qubits' header");
        }
        char* end = nullptr;
        const double re = std::strtod(first.c_str(), &end);
        if (end != first.c_str() + first.size()) {
            throw ParseError(line_no, "bad real part '" + first + "'");
        }
        std::string im_word;
        std::string extra;
        if (!(words >> im_word) || (words >> extra)) {
            throw ParseError(line_no, "expected '<re> <im>'");
        }
        const double im = std::strtod(im_word.c_str(), &end);
        if (end != im_word.c_str() + im_word.size()) {
            throw ParseError(line_no, "bad imaginary part '" + im_word + "'");
        }
        amps.emplace_back(re, im);
    }
    if (n == 0) {
        throw ParseError(line_no, "missing 'qubits' header");
    }
    if (amps.size() != (std::size_t{1} << n)) {
        throw ParseError(line_no, "expected " + std::to_string(std::size_t{1} << n) + " amplitudes, got " +
                                      std::to_string(amps.size()));
    }
    return {n, std::move(amps)};
}

namespace kernels {

void apply_1q(std::span<Complex> amps, std::size_t qubit, const Mat2& u) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps[i];
            const Complex a1 = amps[i + stride];
            amps[i] = u[0] * a0 + u[1] * a1;
            amps[i + stride] = u[2] * a0 + u[3] * a1;
        }
    }
}

void apply_x(std::span<Complex> amps, std::size_t qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            std::swap(amps[i], amps[i + stride]);
        }
    }
}

void apply_diag(std::span<Complex> amps, std::size_t qubit, Complex d0, Complex d1) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            amps[i] *= d0;
            amps[i + stride] *= d1;
        }
    }
}

void apply_cx(std::span<Complex> amps, std::size_t control, std::size_t target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amps[i], amps[i | tmask]);
        }
    }
}

void apply_gate(std::span<Complex> amps, const Gate& g, std::size_t offset, bool conjugate) {
    switch (g.kind()) {
        case GateKind::RZ: {
            const double h = 0.5 * g.angle();
            const Complex d0 = std::polar(1.0, conjugate ? h : -h);
            apply_diag(amps, g.qubit(0) + offset, d0, std::conj(d0));
            break;
        }
        case GateKind::X:
            apply_x(amps, g.qubit(0) + offset);
            break;
        case GateKind::SX: {
            Mat2 u = gate_matrix(g);
            if (conjugate) {
                for (auto& e : u) {
                    e = std::conj(e);
                }
            }
            apply_1q(amps, g.qubit(0) + offset, u);
            break;
        }
        case GateKind::CX:
            apply_cx(amps, g.control() + offset, g.target() + offset);
            break;
    }
}

}  // namespace kernels

Mat2 gate_matrix(const Gate& g) {
    switch (g.kind()) {
        case GateKind::RZ: {
            const Complex d0 = std::polar(1.0, -0.5 * g.angle());
            return {d0, 0.0, 0.0, std::conj(d0)};
        }
        case GateKind::X:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::SX:
            return {Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5)};
        case GateKind::CX:
            break;
    }
    throw std::invalid_argument("gate_matrix: CX is not a single-qubit gate");
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Mat2 dagger(const Mat2& a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

}  // namespace aprep
