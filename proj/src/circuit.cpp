#include "aprep/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aprep {

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::RZ:
            return "rz";
        case GateKind::X:
            return "x";
        case GateKind::SX:
            return "sx";
        case GateKind::CX:
            return "cx";
    }
    return "?";
}

double normalize_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("rotation angle is not finite");
    }
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

bool angle_is_zero(double theta, double tol) {
    const double r = normalize_angle(theta);
    return r < tol || kTwoPi - r < tol;
}

Gate Gate::rz(std::size_t qubit, double theta) { return {GateKind::RZ, qubit, 0, normalize_angle(theta)}; }
Gate Gate::x(std::size_t qubit) { return {GateKind::X, qubit, 0, 0.0}; }
Gate Gate::sx(std::size_t qubit) { return {GateKind::SX, qubit, 0, 0.0}; }

Gate Gate::cx(std::size_t control, std::size_t target) {
    if (control == target) {
        throw std::invalid_argument("cx: control and target must differ");
    }
    return {GateKind::CX, control, target, 0.0};
}

std::optional<double> Gate::param() const {
    if (kind_ == GateKind::RZ) {
        return angle_;
    }
    return std::nullopt;
}

bool Gate::acts_on(std::size_t q) const {
    return qubits_[0] == q || (kind_ == GateKind::CX && qubits_[1] == q);
}

bool operator==(const Gate& a, const Gate& b) {
    if (a.kind_ != b.kind_ || a.qubits_[0] != b.qubits_[0]) {
        return false;
    }
    if (a.kind_ == GateKind::CX) {
        return a.qubits_[1] == b.qubits_[1];
    }
    if (a.kind_ == GateKind::RZ) {
        return a.angle_ == b.angle_;
    }
    return true;
}

std::vector<Gate> inverse_of(const Gate& g) {
    switch (g.kind()) {
        case GateKind::RZ:
            return {Gate::rz(g.qubit(0), kTwoPi - g.angle())};
        case GateKind::SX: {
            const double pi = kTwoPi / 2;
            return {Gate::rz(g.qubit(0), pi), Gate::sx(g.qubit(0)), Gate::rz(g.qubit(0), pi)};
        }
        case GateKind::X:
        case GateKind::CX:
            return {g};
    }
    return {g};
}

std::vector<std::size_t> identity_layout(std::size_t n) {
    std::vector<std::size_t> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = i;
    }
    return l;
}

bool is_permutation(std::span<const std::size_t> perm) {
    std::vector<bool> seen(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || seen[p]) {
            return false;
        }
        seen[p] = true;
    }
    return true;
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        inv[perm[i]] = i;
    }
    return inv;
}

namespace {

void check_gates(std::size_t n, const std::vector<Gate>& gates) {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        for (auto q : gates[i].qubits()) {
            if (q >= n) {
                throw std::invalid_argument("gate " + std::to_string(i) + " uses qubit " + std::to_string(q) +
                                            " on a " + std::to_string(n) + "-qubit circuit");
            }
        }
    }
}

}  // namespace

Circuit::Circuit(std::size_t n_qubits) : Circuit(n_qubits, {}) {}

Circuit::Circuit(std::size_t n_qubits, std::vector<Gate> gates)
    : Circuit(n_qubits, std::move(gates), identity_layout(n_qubits)) {}

Circuit::Circuit(std::size_t n_qubits, std::vector<Gate> gates, std::vector<std::size_t> layout)
    : n_qubits_(n_qubits), gates_(std::move(gates)), layout_(std::move(layout)) {
    if (n_qubits_ == 0) {
        throw std::invalid_argument("circuit needs at least one qubit");
    }
    if (layout_.size() != n_qubits_ || !is_permutation(layout_)) {
        throw std::invalid_argument("layout is not a permutation of the qubits");
    }
    check_gates(n_qubits_, gates_);
}

Circuit Circuit::with_gates(std::vector<Gate> gates) const { return {n_qubits_, std::move(gates), layout_}; }

Circuit Circuit::with_layout(std::vector<std::size_t> layout) const { return {n_qubits_, gates_, std::move(layout)}; }

std::size_t cnot_count(const Circuit& c) {
    return static_cast<std::size_t>(
        std::count_if(c.gates().begin(), c.gates().end(), [](const Gate& g) { return g.kind() == GateKind::CX; }));
}

std::size_t single_qubit_count(const Circuit& c) { return c.size() - cnot_count(c); }

std::size_t cost(const Circuit& c) { return single_qubit_count(c) + 10 * cnot_count(c); }

namespace {

// One left-to-right sweep. `live` marks surviving gates; `top[q]` is a stack of
// live gate indices touching wire q, so the back of each stack is the gate a
// new gate on that wire is adjacent to.
bool clean_pass(std::vector<Gate>& gates, std::size_t n) {
    std::vector<Gate> out;
    std::vector<bool> live;
    std::vector<std::vector<std::size_t>> top(n);
    bool changed = false;

    auto drop = [&](std::size_t k) {
        live[k] = false;
        for (auto q : out[k].qubits()) {
            top[q].pop_back();
        }
    };

    for (const auto& g : gates) {
        if (g.kind() == GateKind::RZ && angle_is_zero(g.angle())) {
            changed = true;
            continue;
        }
        std::optional<std::size_t> prev;
        bool adjacent = true;
        for (auto q : g.qubits()) {
            if (top[q].empty()) {
                adjacent = false;
                break;
            }
            if (prev && *prev != top[q].back()) {
                adjacent = false;
                break;
            }
            prev = top[q].back();
        }
        if (adjacent && prev) {
            const Gate& p = out[*prev];
            const bool same_wires = p.kind() == g.kind() && p.qubit(0) == g.qubit(0) &&
                                    (g.kind() != GateKind::CX || p.target() == g.target());
            if (same_wires) {
                if (g.kind() == GateKind::X || g.kind() == GateKind::CX) {
                    drop(*prev);
                    changed = true;
                    continue;
                }
                if (g.kind() == GateKind::RZ) {
                    const double merged = p.angle() + g.angle();
                    changed = true;
                    if (angle_is_zero(merged)) {
                        drop(*prev);
                    } else {
                        out[*prev] = Gate::rz(g.qubit(0), merged);
                    }
                    continue;
                }
            }
        }
        const std::size_t k = out.size();
        out.push_back(g);
        live.push_back(true);
        for (auto q : g.qubits()) {
            top[q].push_back(k);
        }
    }

    std::vector<Gate> kept;
    kept.reserve(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (live[k]) {
            kept.push_back(out[k]);
        }
    }
    gates = std::move(kept);
    return changed;
}

}  // namespace

Circuit clean(const Circuit& c) {
    std::vector<Gate> gates = c.gates();
    while (clean_pass(gates, c.n_qubits())) {
    }
    return c.with_gates(std::move(gates));
}

std::size_t cnot_upper_bound(std::size_t n) {
    if (n < 2) {
        throw std::domain_error("cnot_upper_bound: n must be at least 2");
    }
    switch (n) {
        case 2:
            return 1;
        case 3:
            return 3;
        case 4:
            return 9;
        default:
            break;
    }
    const double p = std::ldexp(1.0, static_cast<int>(n));
    double value = 0.0;
    if (n % 2 == 1) {
        value = 23.0 / 24.0 * p - 1.5 * std::ldexp(1.0, static_cast<int>((n + 1) / 2)) + 4.0 / 3.0;
    } else {
        value = 23.0 / 24.0 * p - std::ldexp(1.0, static_cast<int>(n / 2 + 1)) + 5.0 / 3.0;
    }
    // The bound is an integer for odd n; absorb rounding noise before the ceiling.
    return static_cast<std::size_t>(std::ceil(value - 1e-9));
}

std::string serialize(const Circuit& c) {
    std::string out = "qubits " + std::to_string(c.n_qubits()) + "\nlayout";
    for (auto p : c.layout()) {
        out += ' ';
        out += std::to_string(p);
    }
    out += '\n';
    char buf[64];
    for (const auto& g : c.gates()) {
        out += gate_name(g.kind());
        for (auto q : g.qubits()) {
            out += ' ';
            out += std::to_string(q);
        }
        if (g.kind() == GateKind::RZ) {
            std::snprintf(buf, sizeof buf, " %.17g", g.angle());
            out += buf;
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            words.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return words;
}

std::size_t parse_index(std::string_view w, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || ptr != w.data() + w.size()) {
        throw ParseError(line, "expected a non-negative integer, got '" + std::string(w) + "'");
    }
    return v;
}

double parse_real(std::string_view w, std::size_t line) {
    // strtod rather than from_chars<double>: libstdc++ 11 lacks the latter.
    std::string s(w);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) {
        throw ParseError(line, "expected a real number, got '" + s + "'");
    }
    return v;
}

}  // namespace

Circuit deserialize(std::string_view text) {
    std::optional<std::size_t> n;
    std::optional<std::vector<std::size_t>> layout;
    std::vector<Gate> gates;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto hash = line.find('#');
        const auto words = split_words(hash == std::string_view::npos ? line : line.substr(0, hash));
        if (words.empty()) {
            continue;
        }
        const auto op = words[0];
        auto expect = [&](std::size_t count) {
            if (words.size() != count) {
                throw ParseError(line_no, "'" + std::string(op) + "' expects " + std::to_string(count - 1) +
                                              " arguments");
            }
        };
        auto qubit = [&](std::size_t i) {
            const auto q = parse_index(words[i], line_no);
            if (!n) {
                throw ParseError(line_no, "gate before 'qubits' header");
            }
            if (q >= *n) {
                throw ParseError(line_no, "qubit " + std::to_string(q) + " out of range for " + std::to_string(*n) +
                                              " qubits");
            }
            return q;
        };

        if (op == "qubits") {
            expect(2);
            if (n) {
                throw ParseError(line_no, "duplicate 'qubits' header");
            }
            n = parse_index(words[1], line_no);
            if (*n == 0) {
                throw ParseError(line_no, "qubit count must be positive");
            }
        } else if (op == "layout") {
            if (!n) {
                throw ParseError(line_no, "'layout' before 'qubits' header");
            }
            expect(*n + 1);
            std::vector<std::size_t> l;
            for (std::size_t i = 1; i < words.size(); ++i) {
                l.push_back(parse_index(words[i], line_no));
            }
            if (!is_permutation(l)) {
                throw ParseError(line_no, "layout is not a permutation");
            }
            layout = std::move(l);
        } else if (op == "rz") {
            expect(3);
            const double theta = parse_real(words[2], line_no);
            if (!std::isfinite(theta)) {
                throw ParseError(line_no, "angle is not finite");
            }
            gates.push_back(Gate::rz(qubit(1), theta));
        } else if (op == "x") {
            expect(2);
            gates.push_back(Gate::x(qubit(1)));
        } else if (op == "sx") {
            expect(2);
            gates.push_back(Gate::sx(qubit(1)));
        } else if (op == "cx") {
            expect(3);
            const auto c = qubit(1);
            const auto t = qubit(2);
            if (c == t) {
                throw ParseError(line_no, "cx control equals target");
            }
            gates.push_back(Gate::cx(c, t));
        } else {
            throw ParseError(line_no, "unknown instruction '" + std::string(op) + "'");
        }
    }
    if (!n) {
        throw ParseError(line_no, "missing 'qubits' header");
    }
    return {*n, std::move(gates), layout ? *layout : identity_layout(*n)};
}

}  // namespace aprep
