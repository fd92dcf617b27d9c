#include "aprep/baseline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "aprep/rng.hpp"
#include "aprep/simulator.hpp"

namespace aprep {

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {c, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda)};
}

// Derivatives of u3_matrix with respect to (theta, phi, lambda).
std::array<Mat2, 3> u3_partials(double theta, double phi, double lambda) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const Complex i(0.0, 1.0);
    return {{
        {-0.5 * s, -std::polar(0.5 * c, lambda), std::polar(0.5 * c, phi), -std::polar(0.5 * s, phi + lambda)},
        {0.0, 0.0, i * std::polar(s, phi), i * std::polar(c, phi + lambda)},
        {0.0, -i * std::polar(s, lambda), 0.0, i * std::polar(c, phi + lambda)},
    }};
}

}  // namespace

std::vector<Gate> su2_to_native(const Mat2& u, std::size_t qubit) {
    const Mat2 p = matmul(dagger(u), u);
    const double err = std::abs(p[0] - 1.0) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3] - 1.0);
    if (!(err <= 1e-10)) {
        throw std::invalid_argument("su2_to_native: matrix is not unitary");
    }
    // Strip the determinant phase: v = u / sqrt(det u) = [[a, -conj(b)], [b, conj(a)]].
    const Complex det = u[0] * u[3] - u[1] * u[2];
    const Complex root = std::sqrt(det);
    const Complex a = u[0] / root;
    const Complex b = u[2] / root;
    const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    constexpr double tol = 1e-12;

    std::vector<Gate> out;
    auto push_rz = [&](double angle) {
        if (!angle_is_zero(angle, tol)) {
            out.push_back(Gate::rz(qubit, angle));
        }
    };
    if (std::abs(b) < tol) {
        // Diagonal: u ~ RZ(phi + lambda) with phi + lambda = -2 arg(a).
        push_rz(-2.0 * std::arg(a));
        return out;
    }
    if (std::abs(a) < tol) {
        // Anti-diagonal: u ~ X RZ(lambda - phi + pi) with phi - lambda = 2 arg(b).
        push_rz(-2.0 * std::arg(b) + kPi);
        out.push_back(Gate::x(qubit));
        return out;
    }
    const double sum = -2.0 * std::arg(a);   // phi + lambda
    const double diff = 2.0 * std::arg(b);   // phi - lambda
    const double phi = 0.5 * (sum + diff);
    const double lambda = 0.5 * (sum - diff);
    push_rz(lambda);
    out.push_back(Gate::sx(qubit));
    push_rz(theta + kPi);
    out.push_back(Gate::sx(qubit));
    push_rz(phi + kPi);
    return out;
}

Circuit route(const Circuit& c, const CouplingMap& m) {
    if (c.n_qubits() != m.n_qubits()) {
        throw std::invalid_argument("route: circuit and coupling map sizes differ");
    }
    if (!m.connected()) {
        throw std::domain_error("route: coupling map is disconnected");
    }
    std::vector<std::size_t> place = c.layout();  // logical -> physical
    std::vector<std::size_t> occupant = invert_permutation(place);
    std::vector<Gate> physical;
    physical.reserve(c.size());

    auto swap_physical = [&](std::size_t p, std::size_t q) {
        physical.push_back(Gate::cx(p, q));
        physical.push_back(Gate::cx(q, p));
        physical.push_back(Gate::cx(p, q));
        std::swap(occupant[p], occupant[q]);
        place[occupant[p]] = p;
        place[occupant[q]] = q;
    };

    for (const auto& g : c.gates()) {
        if (g.kind() == GateKind::CX) {
            const auto pt = place[g.target()];
            auto pc = place[g.control()];
            if (!m.adjacent(pc, pt)) {
                const auto path = m.shortest_path(pc, pt);
                for (std::size_t i = 0; i + 2 < path.size(); ++i) {
                    swap_physical(path[i], path[i + 1]);
                }
                pc = place[g.control()];
            }
            physical.push_back(Gate::cx(pc, pt));
        } else {
            physical.push_back(g.relabeled([&](std::size_t q) { return place[q]; }));
        }
    }

    // Physical wire p carries logical qubit occupant[p] at the end; name each
    // wire after that qubit and place it with the final layout.
    std::vector<Gate> gates;
    gates.reserve(physical.size());
    for (const auto& g : physical) {
        gates.push_back(g.relabeled([&](std::size_t p) { return occupant[p]; }));
    }
    return {c.n_qubits(), std::move(gates), place};
}

namespace {

// Emits the multiplexor either as R(a) CX R(b) CX or, reversed, as
// CX R(b) CX R(a); both equal the same operator because all rotations share
// one axis. Alternating the order puts two CX with the same control next to
// each other around the top-level CX, where they cancel.
std::vector<Gate> emit_multiplexor(RotationAxis axis, std::size_t target, std::span<const std::size_t> controls,
                                   std::span<const double> angles, bool reversed) {
    if (controls.empty()) {
        if (axis == RotationAxis::Z) {
            if (angle_is_zero(angles[0])) {
                return {};
            }
            return {Gate::rz(target, angles[0])};
        }
        const double c = std::cos(0.5 * angles[0]);
        const double s = std::sin(0.5 * angles[0]);
        return su2_to_native({c, -s, s, c}, target);
    }
    // With the top control c: R(a) CX(c,t) R(b) CX(c,t) applies a + b when c
    // reads 0 and a - b when it reads 1, since X R(b) X = R(-b) for Y and Z.
    const std::size_t half = angles.size() / 2;
    std::vector<double> sum(half);
    std::vector<double> diff(half);
    for (std::size_t k = 0; k < half; ++k) {
        sum[k] = 0.5 * (angles[k] + angles[k + half]);
        diff[k] = 0.5 * (angles[k] - angles[k + half]);
    }
    const auto rest = controls.first(controls.size() - 1);
    const Gate cx = Gate::cx(controls.back(), target);

    auto first = emit_multiplexor(axis, target, rest, reversed ? diff : sum, false);
    auto second = emit_multiplexor(axis, target, rest, reversed ? sum : diff, true);
    if (!rest.empty()) {
        // first ends and second starts with CX(rest.back(), t); both commute
        // with cx and cancel.
        first.pop_back();
        second.erase(second.begin());
    }
    std::vector<Gate> out;
    out.reserve(first.size() + second.size() + 2);
    if (reversed) {
        out.push_back(cx);
    }
    out.insert(out.end(), first.begin(), first.end());
    out.push_back(cx);
    out.insert(out.end(), second.begin(), second.end());
    if (!reversed) {
        out.push_back(cx);
    }
    return out;
}

}  // namespace

std::vector<Gate> multiplexed_rotation(RotationAxis axis, std::size_t target, const std::vector<std::size_t>& controls,
                                       const std::vector<double>& angles) {
    if (angles.size() != (std::size_t{1} << controls.size())) {
        throw std::invalid_argument("multiplexed_rotation: need 2^k angles for k controls");
    }
    return emit_multiplexor(axis, target, controls, angles, false);
}

Circuit multiplexed_prepare(const StateVector& target) {
    const std::size_t n = target.n_qubits();
    const auto amps = target.amplitudes();
    std::vector<Gate> gates;

    // Magnitudes, most significant qubit first. Qubit j is rotated under the
    // control of qubits j+1..n-1; prefix k holds their values.
    for (std::size_t jj = n; jj-- > 0;) {
        const std::size_t j = jj;
        const std::size_t prefixes = std::size_t{1} << (n - 1 - j);
        const std::size_t low = std::size_t{1} << j;
        std::vector<double> angles(prefixes);
        for (std::size_t k = 0; k < prefixes; ++k) {
            double w0 = 0.0;
            double w1 = 0.0;
            for (std::size_t l = 0; l < low; ++l) {
                w0 += std::norm(amps[(k << (j + 1)) | l]);
                w1 += std::norm(amps[(k << (j + 1)) | low | l]);
            }
            angles[k] = 2.0 * std::atan2(std::sqrt(w1), std::sqrt(w0));
        }
        std::vector<std::size_t> controls;
        for (std::size_t q = j + 1; q < n; ++q) {
            controls.push_back(q);
        }
        auto part = multiplexed_rotation(RotationAxis::Y, j, controls, angles);
        gates.insert(gates.end(), part.begin(), part.end());
    }

    // Phases as a product of uniformly controlled RZ, least significant first.
    std::vector<double> phase(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        phase[i] = std::arg(amps[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t half = phase.size() / 2;
        std::vector<double> alpha(half);
        std::vector<double> beta(half);
        for (std::size_t m = 0; m < half; ++m) {
            alpha[m] = phase[2 * m + 1] - phase[2 * m];
            beta[m] = 0.5 * (phase[2 * m] + phase[2 * m + 1]);
        }
        std::vector<std::size_t> controls;
        for (std::size_t q = j + 1; q < n; ++q) {
            controls.push_back(q);
        }
        auto part = multiplexed_rotation(RotationAxis::Z, j, controls, alpha);
        gates.insert(gates.end(), part.begin(), part.end());
        phase = std::move(beta);
    }
    return {n, std::move(gates)};
}

std::vector<std::pair<std::size_t, std::size_t>> chain_skeleton(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (n < 2) {
        return out;
    }
    const std::size_t total = cnot_upper_bound(n);
    for (std::size_t i = 0; out.size() < total; i = (i + 1) % (n - 1)) {
        out.emplace_back(i, i + 1);
    }
    return out;
}

namespace {

// Parametrized circuit: a U3 on every qubit, then each skeleton CX followed by
// a U3 on both of its qubits.
struct Ansatz {
    struct Op {
        bool is_cx;
        std::size_t a;
        std::size_t b;      // cx target
        std::size_t param;  // index of theta for a U3
    };
    std::size_t n;
    std::vector<Op> ops;
    std::size_t n_params;  // U3 angles plus one global phase

    Ansatz(std::size_t n_qubits, const std::vector<std::pair<std::size_t, std::size_t>>& skeleton) : n(n_qubits) {
        std::size_t p = 0;
        for (std::size_t q = 0; q < n; ++q) {
            ops.push_back({false, q, 0, p});
            p += 3;
        }
        for (auto [c, t] : skeleton) {
            ops.push_back({true, c, t, 0});
            ops.push_back({false, c, 0, p});
            p += 3;
            ops.push_back({false, t, 0, p});
            p += 3;
        }
        n_params = p + 1;
    }

    std::vector<Complex> run(const Eigen::VectorXd& x, std::size_t from, std::vector<Complex> psi) const {
        for (std::size_t k = from; k < ops.size(); ++k) {
            const auto& op = ops[k];
            if (op.is_cx) {
                kernels::apply_cx(psi, op.a, op.b);
            } else {
                kernels::apply_1q(psi, op.a, u3_matrix(x[op.param], x[op.param + 1], x[op.param + 2]));
            }
        }
        return psi;
    }
};

struct LmResult {
    Eigen::VectorXd x;
    double residual;
};

LmResult levenberg_marquardt(const Ansatz& ansatz, const std::vector<Complex>& target, Eigen::VectorXd x) {
    const std::size_t dim = target.size();
    const auto np = static_cast<Eigen::Index>(ansatz.n_params);
    const auto nr = static_cast<Eigen::Index>(2 * dim);
    const std::size_t gphase = ansatz.n_params - 1;

    std::vector<Complex> zero(dim);
    zero[0] = 1.0;

    auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
        const auto psi = ansatz.run(v, 0, zero);
        const Complex ph = std::polar(1.0, v[static_cast<Eigen::Index>(gphase)]);
        r.resize(nr);
        for (std::size_t i = 0; i < dim; ++i) {
            const Complex d = psi[i] - ph * target[i];
            r[static_cast<Eigen::Index>(i)] = d.real();
            r[static_cast<Eigen::Index>(i + dim)] = d.imag();
        }
        return r.squaredNorm();
    };

    auto jacobian = [&](const Eigen::VectorXd& v, Eigen::MatrixXd& jac) {
        jac.setZero(nr, np);
        std::vector<Complex> psi = zero;
        for (std::size_t k = 0; k < ansatz.ops.size(); ++k) {
            const auto& op = ansatz.ops[k];
            if (op.is_cx) {
                kernels::apply_cx(psi, op.a, op.b);
                continue;
            }
            const auto partials = u3_partials(v[op.param], v[op.param + 1], v[op.param + 2]);
            for (std::size_t j = 0; j < 3; ++j) {
                std::vector<Complex> d = psi;
                kernels::apply_1q(d, op.a, partials[j]);
                d = ansatz.run(v, k + 1, std::move(d));
                const auto col = static_cast<Eigen::Index>(op.param + j);
                for (std::size_t i = 0; i < dim; ++i) {
                    jac(static_cast<Eigen::Index>(i), col) = d[i].real();
                    jac(static_cast<Eigen::Index>(i + dim), col) = d[i].imag();
                }
            }
            kernels::apply_1q(psi, op.a, u3_matrix(v[op.param], v[op.param + 1], v[op.param + 2]));
        }
        const Complex ph = std::polar(1.0, v[static_cast<Eigen::Index>(gphase)]);
        for (std::size_t i = 0; i < dim; ++i) {
            const Complex d = -Complex(0.0, 1.0) * ph * target[i];
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(gphase)) = d.real();
            jac(static_cast<Eigen::Index>(i + dim), static_cast<Eigen::Index>(gphase)) = d.imag();
        }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double f = residual(x, r);
    double mu = 1e-3;
    for (int iter = 0; iter < 3000 && f > 1e-26; ++iter) {
        jacobian(x, jac);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool improved = false;
        while (mu < 1e10) {
            Eigen::MatrixXd h = jtj;
            h.diagonal().array() += mu;
            const Eigen::VectorXd step = h.ldlt().solve(-g);
            const Eigen::VectorXd trial = x + step;
            Eigen::VectorXd rt;
            const double ft = residual(trial, rt);
            if (ft < f) {
                x = trial;
                r = std::move(rt);
                const double gain = f - ft;
                f = ft;
                mu = std::max(mu / 3.0, 1e-12);
                improved = gain > 1e-16 * f || f < 1e-26;
                break;
            }
            mu *= 4.0;
        }
        if (!improved && mu >= 1e10) {
            break;
        }
    }
    return {std::move(x), f};
}

}  // namespace

SkeletonFit fit_skeleton(const StateVector& target, const std::vector<std::pair<std::size_t, std::size_t>>& skeleton,
                         std::size_t max_restarts) {
    const std::size_t n = target.n_qubits();
    const Ansatz ansatz(n, skeleton);
    const std::vector<Complex> t(target.amplitudes().begin(), target.amplitudes().end());
    Rng rng(derive_seed(0xB45E11AEULL, n));

    std::optional<SkeletonFit> best;
    for (std::size_t attempt = 0; attempt < max_restarts; ++attempt) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(ansatz.n_params));
        for (auto& v : x) {
            v = rng.uniform(0.0, kTwoPi);
        }
        const auto fit = levenberg_marquardt(ansatz, t, std::move(x));

        std::vector<Gate> gates;
        for (const auto& op : ansatz.ops) {
            if (op.is_cx) {
                gates.push_back(Gate::cx(op.a, op.b));
            } else {
                const auto u = u3_matrix(fit.x[op.param], fit.x[op.param + 1], fit.x[op.param + 2]);
                auto native = su2_to_native(u, op.a);
                gates.insert(gates.end(), native.begin(), native.end());
            }
        }
        Circuit circuit(n, std::move(gates));
        const double infidelity = 1.0 - fidelity_pure(target, prepare(circuit));
        if (!best || infidelity < best->infidelity) {
            best = SkeletonFit{std::move(circuit), infidelity, attempt};
        }
        if (infidelity < 1e-12) {
            break;
        }
    }
    return *best;
}

Circuit exact_prepare(const StateVector& target, const CouplingMap& m) {
    const std::size_t n = target.n_qubits();
    if (std::abs(target.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("exact_prepare: target is not normalized");
    }
    if (n > kMaxDensityQubits) {
        throw std::invalid_argument("exact_prepare: at most 10 qubits supported");
    }
    if (m.n_qubits() != n) {
        throw std::invalid_argument("exact_prepare: coupling map size mismatch");
    }

    std::optional<Circuit> logical;
    if (n >= 2 && n <= 5) {
        // Product states need no CX at all.
        auto product = fit_skeleton(target, {}, 2);
        if (product.infidelity < 1e-10) {
            logical = std::move(product.circuit);
        } else {
            auto fit = fit_skeleton(target, chain_skeleton(n));
            if (fit.infidelity < 1e-10) {
                logical = std::move(fit.circuit);
            }
        }
    }
    if (!logical) {
        logical = multiplexed_prepare(target);
    }
    return clean(route(clean(*logical), m));
}

std::vector<Circuit> approximate_family(const StateVector& target, const CouplingMap& m, std::size_t restarts) {
    const std::size_t n = target.n_qubits();
    if (m.n_qubits() != n) {
        throw std::invalid_argument("approximate_family: coupling map size mismatch");
    }
    std::vector<Circuit> out;
    if (n < 2 || n > 5) {
        return out;
    }
    const auto full = chain_skeleton(n);
    for (std::size_t k = 0; k < full.size(); ++k) {
        const std::vector<std::pair<std::size_t, std::size_t>> prefix(full.begin(),
                                                                      full.begin() + static_cast<std::ptrdiff_t>(k));
        out.push_back(clean(route(clean(fit_skeleton(target, prefix, restarts).circuit), m)));
    }
    return out;
}

}  // namespace aprep
