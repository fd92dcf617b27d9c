#include "aprep/coupling_map.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace aprep {

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

}  // namespace

CouplingMap::CouplingMap(std::size_t n_qubits, std::vector<Edge> edges) : n_(n_qubits), neighbors_(n_qubits) {
    if (n_ == 0) {
        throw std::invalid_argument("coupling map needs at least one qubit");
    }
    for (auto& [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("coupling map self-loop on qubit " + std::to_string(a));
        }
        if (a >= n_ || b >= n_) {
            throw std::invalid_argument("coupling map edge " + std::to_string(a) + "-" + std::to_string(b) +
                                        " out of range");
        }
        if (a > b) {
            std::swap(a, b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (auto [a, b] : edges_) {
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
    }

    dist_.assign(n_ * n_, kUnreachable);
    for (std::size_t s = 0; s < n_; ++s) {
        std::deque<std::size_t> queue{s};
        dist_[s * n_ + s] = 0;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            for (auto v : neighbors_[u]) {
                if (dist_[s * n_ + v] == kUnreachable) {
                    dist_[s * n_ + v] = dist_[s * n_ + u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    connected_ = std::none_of(dist_.begin(), dist_.end(), [](auto d) { return d == kUnreachable; });
}

bool CouplingMap::adjacent(std::size_t a, std::size_t b) const {
    if (a >= n_ || b >= n_ || a == b) {
        return false;
    }
    return dist_[a * n_ + b] == 1;
}

std::size_t CouplingMap::distance(std::size_t a, std::size_t b) const {
    const auto d = dist_.at(a * n_ + b);
    if (d == kUnreachable) {
        throw std::domain_error("qubits " + std::to_string(a) + " and " + std::to_string(b) + " are not connected");
    }
    return d;
}

std::vector<std::size_t> CouplingMap::shortest_path(std::size_t a, std::size_t b) const {
    std::size_t d = distance(a, b);
    std::vector<std::size_t> path{a};
    std::size_t cur = a;
    while (d > 0) {
        // Lowest-index neighbor one step closer; deterministic.
        for (auto v : neighbors_[cur]) {
            if (dist_[v * n_ + b] == d - 1) {
                cur = v;
                break;
            }
        }
        path.push_back(cur);
        --d;
    }
    return path;
}

namespace coupling {

CouplingMap falcon_5t() { return {5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}}; }

CouplingMap line(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        e.emplace_back(i, i + 1);
    }
    return {n, std::move(e)};
}

CouplingMap ring(std::size_t n) {
    auto e = line(n).edges();
    if (n > 2) {
        e.emplace_back(0, n - 1);
    }
    return {n, std::move(e)};
}

CouplingMap complete(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            e.emplace_back(i, j);
        }
    }
    return {n, std::move(e)};
}

CouplingMap induced(const CouplingMap& m, const std::vector<std::size_t>& vertices) {
    std::vector<std::size_t> relabel(m.n_qubits(), kUnreachable);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i] >= m.n_qubits() || relabel[vertices[i]] != kUnreachable) {
            throw std::invalid_argument("induced: invalid vertex list");
        }
        relabel[vertices[i]] = i;
    }
    std::vector<Edge> e;
    for (auto [a, b] : m.edges()) {
        if (relabel[a] != kUnreachable && relabel[b] != kUnreachable) {
            e.emplace_back(relabel[a], relabel[b]);
        }
    }
    return {vertices.size(), std::move(e)};
}

namespace {

std::optional<std::size_t> suffix_size(std::string_view name, std::string_view prefix) {
    if (!name.starts_with(prefix)) {
        return std::nullopt;
    }
    const auto rest = name.substr(prefix.size());
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || n == 0) {
        return std::nullopt;
    }
    return n;
}

}  // namespace

CouplingMap preset(std::string_view name) {
    if (name == "falcon-5t") {
        return falcon_5t();
    }
    if (name == "falcon-5t-line4") {
        return induced(falcon_5t(), {0, 1, 3, 4});
    }
    if (auto n = suffix_size(name, "line-")) {
        return line(*n);
    }
    if (auto n = suffix_size(name, "ring-")) {
        return ring(*n);
    }
    if (auto n = suffix_size(name, "complete-")) {
        return complete(*n);
    }
    throw std::invalid_argument("unknown coupling preset '" + std::string(name) + "'");
}

CouplingMap parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> n;
    std::vector<Edge> edges;
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
            std::size_t v = 0;
            if (n || !(words >> v) || v == 0) {
                throw ParseError(line_no, "bad 'qubits' header");
            }
            n = v;
        } else {
            if (!n) {
                throw ParseError(line_no, "edge before 'qubits' header");
            }
            std::size_t a = 0;
            std::size_t b = 0;
            std::istringstream pair(line);
            std::string extra;
            if (!(pair >> a >> b) || (pair >> extra)) {
                throw ParseError(line_no, "expected '<a> <b>'");
            }
            if (a >= *n || b >= *n || a == b) {
                throw ParseError(line_no, "invalid edge " + std::to_string(a) + " " + std::to_string(b));
            }
            edges.emplace_back(a, b);
        }
    }
    if (!n) {
        throw ParseError(line_no, "missing 'qubits' header");
    }
    return {*n, std::move(edges)};
}

std::string format(const CouplingMap& m) {
    std::string out = "qubits " + std::to_string(m.n_qubits()) + "\n";
    for (auto [a, b] : m.edges()) {
        out += std::to_string(a) + " " + std::to_string(b) + "\n";
    }
    return out;
}

CouplingMap load(const std::string& preset_or_path) {
    std::ifstream f(preset_or_path);
    if (!f) {
        return preset(preset_or_path);
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

}  // namespace coupling

double average_distance(const CouplingMap& m) {
    if (!m.connected()) {
        throw std::domain_error("average_distance: coupling map is disconnected");
    }
    const auto n = m.n_qubits();
    if (n < 2) {
        throw std::domain_error("average_distance: need at least two qubits");
    }
    std::size_t total = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            total += m.distance(a, b);
        }
    }
    return static_cast<double>(total) / static_cast<double>(n * (n - 1) / 2);
}

LphBounds lph_bounds(const CouplingMap& m) {
    const double d = average_distance(m);
    return {d, 1.0 + 6.0 * (d - 1.0)};
}

std::vector<Violation> validate(const Circuit& c, const CouplingMap& m) {
    std::vector<Violation> out;
    if (c.n_qubits() != m.n_qubits()) {
        out.push_back({0, "circuit has " + std::to_string(c.n_qubits()) + " qubits, coupling map has " +
                              std::to_string(m.n_qubits())});
        return out;
    }
    const auto& layout = c.layout();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& g = c[i];
        bool in_range = true;
        for (auto q : g.qubits()) {
            if (q >= c.n_qubits()) {
                out.push_back({i, "qubit index " + std::to_string(q) + " out of range"});
                in_range = false;
            }
        }
        if (in_range && g.kind() == GateKind::CX) {
            const auto pc = layout[g.control()];
            const auto pt = layout[g.target()];
            if (!m.adjacent(pc, pt)) {
                out.push_back({i, "cx on non-adjacent physical qubits " + std::to_string(pc) + "-" +
                                      std::to_string(pt)});
            }
        }
    }
    return out;
}

}  // namespace aprep
