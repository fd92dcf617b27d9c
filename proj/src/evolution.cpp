#include "aprep/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "aprep/haar.hpp"

namespace aprep {

namespace {

using GateList = std::vector<Gate>;

GateList slice(const GateList& g, std::size_t from, std::size_t to) {
    return {g.begin() + static_cast<std::ptrdiff_t>(from), g.begin() + static_cast<std::ptrdiff_t>(to)};
}

void append(GateList& out, const GateList& more) { out.insert(out.end(), more.begin(), more.end()); }

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// written by exactly one worker.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                fn(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

// Occupied ranks with their members and cumulative e^{-r} weights.
struct RankTable {
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> cumulative;

    explicit RankTable(const std::vector<Individual>& pop) {
        if (pop.empty()) {
            throw std::invalid_argument("select_parent: empty population");
        }
        std::size_t max_rank = 0;
        for (const auto& ind : pop) {
            if (ind.rank == 0) {
                throw std::invalid_argument("select_parent: population is not ranked");
            }
            max_rank = std::max(max_rank, ind.rank);
        }
        std::vector<std::vector<std::size_t>> by_rank(max_rank);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            by_rank[pop[i].rank - 1].push_back(i);
        }
        double total = 0.0;
        for (std::size_t r = 0; r < max_rank; ++r) {
            if (by_rank[r].empty()) {
                continue;
            }
            // Relative to rank 1 so that deep ranks do not underflow to zero
            // before normalization.
            total += std::exp(-static_cast<double>(r));
            members.push_back(std::move(by_rank[r]));
            cumulative.push_back(total);
        }
    }

    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        const auto& rank = members[static_cast<std::size_t>(it - cumulative.begin())];
        return rank[rng.index(rank.size())];
    }
};

}  // namespace

bool dominates(const Fitness& a, const Fitness& b) {
    return a.fidelity >= b.fidelity && a.cost <= b.cost && (a.fidelity > b.fidelity || a.cost < b.cost);
}

Individual evaluate(Circuit c, const StateVector& target) {
    Individual ind{std::move(c), {}, 0, 0.0, std::nullopt};
    ind.fitness.cost = cost(ind.circuit);
    ind.fitness.fidelity = fidelity_pure(target, prepare(ind.circuit));
    return ind;
}

void GAConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("population_size must be at least 2");
    }
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) {
        throw std::invalid_argument("elite_fraction must lie in (0, 1)");
    }
    if (!(emc > 0.0) || !(cmw > 0.0)) {
        throw std::invalid_argument("emc and cmw must be positive");
    }
    if (!(esl >= 1.0)) {
        throw std::invalid_argument("esl must be at least 1 (sequence lengths start at 1)");
    }
    if (threads == 0) {
        throw std::invalid_argument("threads must be positive");
    }
}

std::size_t default_max_circuit_len(std::size_t n) { return n < 2 ? 20 : 20 * cnot_upper_bound(n); }

std::string logbook_csv(const Logbook& log) {
    std::string out =
        "generation,min_fidelity,mean_fidelity,max_fidelity,min_cost,mean_cost,max_cost,front_size,truncations\n";
    char buf[256];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu,%.17g,%zu,%zu,%zu\n", r.generation, r.min_fidelity,
                      r.mean_fidelity, r.max_fidelity, r.min_cost, r.mean_cost, r.max_cost, r.front_size,
                      r.truncations);
        out += buf;
    }
    return out;
}

double mutation_probability(double emc, std::size_t length) {
    return length == 0 ? 0.0 : std::min(1.0, emc / static_cast<double>(length));
}

double continuous_sigma(double cmw, double fidelity) {
    const double eps = std::sqrt(std::max(0.0, 1.0 - fidelity));
    return cmw / std::max(eps, 1e-3);
}

std::size_t sequence_length(double esl, Rng& rng) { return rng.geometric(esl); }

std::vector<Gate> random_sequence(std::size_t length, const CouplingMap& m, std::span<const std::size_t> layout,
                                  Rng& rng) {
    std::vector<Gate> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        out.push_back(random_gate(m, layout, rng));
    }
    return out;
}

std::vector<Gate> inverse_sequence(const std::vector<Gate>& seq) {
    std::vector<Gate> out;
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        append(out, inverse_of(*it));
    }
    return out;
}

Circuit repair(const Circuit& c, const CouplingMap& m, Rng& rng) {
    const auto& layout = c.layout();
    GateList gates = c.gates();
    bool changed = false;
    for (auto& g : gates) {
        if (g.kind() == GateKind::CX && !m.adjacent(layout[g.control()], layout[g.target()])) {
            g = random_cx(m, layout, rng);
            changed = true;
        }
    }
    return changed ? c.with_gates(std::move(gates)) : c;
}

Circuit truncate(const Circuit& c, OperatorContext& ctx) {
    if (c.size() <= ctx.max_len) {
        return c;
    }
    ++ctx.truncations;
    return c.with_gates(slice(c.gates(), 0, ctx.max_len));
}

Gate rewire(const Gate& g, std::span<const std::size_t> layout, OperatorContext& ctx) {
    const std::size_t n = ctx.map.n_qubits();
    if (g.kind() != GateKind::CX) {
        if (n == 1) {
            return g;
        }
        auto q = ctx.rng.index(n - 1);
        if (q >= g.qubit(0)) {
            ++q;
        }
        return g.relabeled([q](std::size_t) { return q; });
    }
    const auto& edges = ctx.map.edges();
    const std::size_t options = 2 * edges.size();
    if (options <= 1) {
        return g;
    }
    // Directed edges in physical labels, skipping the one the gate sits on.
    const std::size_t pc = layout[g.control()];
    const std::size_t pt = layout[g.target()];
    std::size_t current = options;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e] == Edge{pc, pt}) {
            current = 2 * e;
        } else if (edges[e] == Edge{pt, pc}) {
            current = 2 * e + 1;
        }
    }
    std::size_t pick = ctx.rng.index(current == options ? options : options - 1);
    if (current != options && pick >= current) {
        ++pick;
    }
    auto [a, b] = edges[pick / 2];
    if (pick % 2 == 1) {
        std::swap(a, b);
    }
    const auto inv = invert_permutation(layout);
    return Gate::cx(inv[a], inv[b]);
}

Circuit op1_discrete_uniform_mutation(const Circuit& c, OperatorContext& ctx) {
    const double p = mutation_probability(ctx.config.emc, c.size());
    GateList gates = c.gates();
    for (auto& g : gates) {
        if (ctx.rng.bernoulli(p)) {
            g = rewire(g, c.layout(), ctx);
        }
    }
    return c.with_gates(std::move(gates));
}

Circuit op2_continuous_uniform_mutation(const Circuit& c, double fidelity, OperatorContext& ctx) {
    const double p = mutation_probability(ctx.config.emc, c.size());
    const double sigma = continuous_sigma(ctx.config.cmw, fidelity);
    GateList gates = c.gates();
    for (auto& g : gates) {
        if (g.kind() == GateKind::RZ && ctx.rng.bernoulli(p)) {
            g = Gate::rz(g.qubit(0), g.angle() + ctx.rng.normal(0.0, sigma));
        }
    }
    return c.with_gates(std::move(gates));
}

Circuit op3_move_gate(const Circuit& c, OperatorContext& ctx) {
    if (c.size() < 2) {
        return c;
    }
    GateList gates = c.gates();
    const auto from = ctx.rng.index(gates.size());
    const Gate g = gates[from];
    gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(from));
    const auto to = ctx.rng.index(gates.size() + 1);
    gates.insert(gates.begin() + static_cast<std::ptrdiff_t>(to), g);
    return c.with_gates(std::move(gates));
}

Circuit op4_insert_mutate_invert(const Circuit& c, OperatorContext& ctx) {
    if (c.empty()) {
        return c;
    }
    const auto i = ctx.rng.index(c.size());
    const Gate middle = rewire(c[i], c.layout(), ctx);
    const Gate wrap = random_gate(ctx.map, c.layout(), ctx.rng);
    GateList gates = slice(c.gates(), 0, i);
    gates.push_back(wrap);
    gates.push_back(middle);
    append(gates, inverse_of(wrap));
    append(gates, slice(c.gates(), i + 1, c.size()));
    return truncate(c.with_gates(std::move(gates)), ctx);
}

Circuit op5_sequence_insertion(const Circuit& c, OperatorContext& ctx) {
    const auto seq = random_sequence(sequence_length(ctx.config.esl, ctx.rng), ctx.map, c.layout(), ctx.rng);
    const auto at = ctx.rng.index(c.size() + 1);
    GateList gates = slice(c.gates(), 0, at);
    append(gates, seq);
    append(gates, slice(c.gates(), at, c.size()));
    return truncate(c.with_gates(std::move(gates)), ctx);
}

Circuit op6_sequence_and_inverse_insertion(const Circuit& c, OperatorContext& ctx) {
    const auto seq = random_sequence(sequence_length(ctx.config.esl, ctx.rng), ctx.map, c.layout(), ctx.rng);
    const auto i = ctx.rng.index(c.size() + 1);
    const auto j = i + ctx.rng.index(c.size() - i + 1);
    GateList gates = slice(c.gates(), 0, i);
    append(gates, seq);
    append(gates, slice(c.gates(), i, j));
    append(gates, inverse_sequence(seq));
    append(gates, slice(c.gates(), j, c.size()));
    return truncate(c.with_gates(std::move(gates)), ctx);
}

Circuit op7_sequence_deletion(const Circuit& c, OperatorContext& ctx) {
    if (c.empty()) {
        return c;
    }
    const auto len = sequence_length(ctx.config.esl, ctx.rng);
    const auto start = ctx.rng.index(c.size());
    const auto stop = std::min(c.size(), start + len);
    GateList gates = slice(c.gates(), 0, start);
    append(gates, slice(c.gates(), stop, c.size()));
    return c.with_gates(std::move(gates));
}

Circuit op8_sequence_replacement(const Circuit& c, OperatorContext& ctx) {
    return op5_sequence_insertion(op7_sequence_deletion(c, ctx), ctx);
}

Circuit op9_sequence_swap(const Circuit& c, OperatorContext& ctx) {
    if (c.size() < 2) {
        return c;
    }
    std::array<std::size_t, 4> cut{};
    for (auto& x : cut) {
        x = ctx.rng.index(c.size() + 1);
    }
    std::sort(cut.begin(), cut.end());
    const auto& g = c.gates();
    GateList gates = slice(g, 0, cut[0]);
    append(gates, slice(g, cut[2], cut[3]));
    append(gates, slice(g, cut[1], cut[2]));
    append(gates, slice(g, cut[0], cut[1]));
    append(gates, slice(g, cut[3], g.size()));
    return c.with_gates(std::move(gates));
}

Circuit op10_sequence_scramble(const Circuit& c, OperatorContext& ctx) {
    if (c.size() < 2) {
        return c;
    }
    auto a = ctx.rng.index(c.size() + 1);
    auto b = ctx.rng.index(c.size() + 1);
    if (a > b) {
        std::swap(a, b);
    }
    GateList gates = c.gates();
    for (std::size_t i = b; i > a + 1; --i) {
        const auto k = a + ctx.rng.index(i - a);
        std::swap(gates[i - 1], gates[k]);
    }
    return c.with_gates(std::move(gates));
}

std::pair<Circuit, Circuit> op11_crossover(const Circuit& a, const Circuit& b, OperatorContext& ctx) {
    const auto k = ctx.rng.index(a.size() + 1);
    const auto kb = std::min(k, b.size());
    GateList first = slice(a.gates(), 0, k);
    append(first, slice(b.gates(), kb, b.size()));
    GateList second = slice(b.gates(), 0, kb);
    append(second, slice(a.gates(), k, a.size()));
    auto child1 = repair(a.with_gates(std::move(first)), ctx.map, ctx.rng);
    auto child2 = repair(b.with_gates(std::move(second)), ctx.map, ctx.rng);
    return {truncate(child1, ctx), truncate(child2, ctx)};
}

Circuit op12_permutation_mutation(const Circuit& c, OperatorContext& ctx) {
    const std::size_t n = c.n_qubits();
    if (n < 2) {
        return c;
    }
    const auto i = ctx.rng.index(n);
    auto j = ctx.rng.index(n - 1);
    if (j >= i) {
        ++j;
    }
    auto layout = c.layout();
    std::swap(layout[i], layout[j]);
    return repair(c.with_layout(std::move(layout)), ctx.map, ctx.rng);
}

Circuit op13_clean(const Circuit& c) { return clean(c); }

std::vector<std::vector<std::size_t>> nondominated_sort(std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(pop[i].fitness, pop[j].fitness)) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dominates(pop[j].fitness, pop[i].fitness)) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] == 0) {
            fronts[0].push_back(i);
        }
    }
    while (!fronts.back().empty()) {
        std::vector<std::size_t> next;
        for (auto i : fronts.back()) {
            pop[i].rank = fronts.size();
            for (auto j : dominated[i]) {
                if (--count[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();

    // Crowding distance within each front, both objectives normalized by
    // their range on that front.
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& front : fronts) {
        for (auto i : front) {
            pop[i].crowding = 0.0;
        }
        auto sorted = front;
        auto add_distance = [&](auto key) {
            std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return key(a) < key(b); });
            const double lo = key(sorted.front());
            const double hi = key(sorted.back());
            pop[sorted.front()].crowding = inf;
            pop[sorted.back()].crowding = inf;
            if (hi <= lo) {
                return;
            }
            for (std::size_t k = 1; k + 1 < sorted.size(); ++k) {
                pop[sorted[k]].crowding += (key(sorted[k + 1]) - key(sorted[k - 1])) / (hi - lo);
            }
        };
        add_distance([&](std::size_t i) { return static_cast<double>(pop[i].fitness.cost); });
        add_distance([&](std::size_t i) { return pop[i].fitness.fidelity; });
    }
    return fronts;
}

std::size_t select_parent(const std::vector<Individual>& pop, Rng& rng) { return RankTable(pop).draw(rng); }

std::vector<Individual> next_generation(const std::vector<Individual>& pop, const StateVector& target,
                                        OperatorContext& ctx) {
    const std::size_t size = pop.size();
    const RankTable table(pop);

    // The best-fidelity member of rank 1 is always carried over so that the
    // best fidelity never drops, then whole ranks in order, with a random
    // subset of the rank that does not fit completely.
    std::size_t best = table.members.front().front();
    for (auto i : table.members.front()) {
        const auto& f = pop[i].fitness;
        const auto& b = pop[best].fitness;
        if (f.fidelity > b.fidelity || (f.fidelity == b.fidelity && f.cost < b.cost)) {
            best = i;
        }
    }
    const auto n_elite = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ctx.config.elite_fraction * static_cast<double>(size))));
    std::vector<std::size_t> elites{best};
    for (const auto& rank : table.members) {
        if (elites.size() >= n_elite) {
            break;
        }
        std::vector<std::size_t> rest;
        for (auto i : rank) {
            if (i != best) {
                rest.push_back(i);
            }
        }
        const auto room = n_elite - elites.size();
        if (rest.size() > room) {
            ctx.rng.shuffle(rest);
            rest.resize(room);
            std::sort(rest.begin(), rest.end());
        }
        elites.insert(elites.end(), rest.begin(), rest.end());
    }

    std::vector<Individual> next;
    next.reserve(size);
    for (auto i : elites) {
        next.push_back(pop[i]);
    }

    // All random decisions happen here, in order; evaluation comes after.
    std::vector<Circuit> offspring;
    while (next.size() + offspring.size() < size) {
        const auto op = ctx.rng.index(kOperatorCount);
        const auto& parent = pop[table.draw(ctx.rng)];
        const auto& c = parent.circuit;
        switch (op) {
            case 0: offspring.push_back(op1_discrete_uniform_mutation(c, ctx)); break;
            case 1: offspring.push_back(op2_continuous_uniform_mutation(c, parent.fitness.fidelity, ctx)); break;
            case 2: offspring.push_back(op3_move_gate(c, ctx)); break;
            case 3: offspring.push_back(op4_insert_mutate_invert(c, ctx)); break;
            case 4: offspring.push_back(op5_sequence_insertion(c, ctx)); break;
            case 5: offspring.push_back(op6_sequence_and_inverse_insertion(c, ctx)); break;
            case 6: offspring.push_back(op7_sequence_deletion(c, ctx)); break;
            case 7: offspring.push_back(op8_sequence_replacement(c, ctx)); break;
            case 8: offspring.push_back(op9_sequence_swap(c, ctx)); break;
            case 9: offspring.push_back(op10_sequence_scramble(c, ctx)); break;
            case 10: {
                const auto& other = pop[table.draw(ctx.rng)].circuit;
                auto [x, y] = op11_crossover(c, other, ctx);
                offspring.push_back(std::move(x));
                if (next.size() + offspring.size() < size) {
                    offspring.push_back(std::move(y));
                }
                break;
            }
            case 11: offspring.push_back(op12_permutation_mutation(c, ctx)); break;
            default: offspring.push_back(op13_clean(c)); break;
        }
    }

    const auto first = next.size();
    next.resize(size, pop.front());
    parallel_for(offspring.size(), ctx.config.threads,
                 [&](std::size_t i) { next[first + i] = evaluate(std::move(offspring[i]), target); });
    nondominated_sort(next);
    return next;
}

LogRecord summarize(const std::vector<Individual>& pop, std::size_t generation) {
    LogRecord r;
    r.generation = generation;
    if (pop.empty()) {
        return r;
    }
    r.min_fidelity = r.max_fidelity = pop.front().fitness.fidelity;
    r.min_cost = r.max_cost = pop.front().fitness.cost;
    double sf = 0.0;
    double sc = 0.0;
    for (const auto& ind : pop) {
        r.min_fidelity = std::min(r.min_fidelity, ind.fitness.fidelity);
        r.max_fidelity = std::max(r.max_fidelity, ind.fitness.fidelity);
        r.min_cost = std::min(r.min_cost, ind.fitness.cost);
        r.max_cost = std::max(r.max_cost, ind.fitness.cost);
        sf += ind.fitness.fidelity;
        sc += static_cast<double>(ind.fitness.cost);
        r.front_size += ind.rank == 1 ? 1 : 0;
    }
    r.mean_fidelity = sf / static_cast<double>(pop.size());
    r.mean_cost = sc / static_cast<double>(pop.size());
    return r;
}

void update_archive(std::vector<Individual>& archive, const std::vector<Individual>& pop) {
    std::vector<Individual> merged = archive;
    for (const auto& ind : pop) {
        if (ind.rank == 1) {
            merged.push_back(ind);
        }
    }
    archive = pareto_front(merged);
}

EvolutionResult evolve(const StateVector& target, const std::vector<Circuit>& seeds, const GAConfig& config,
                       const CouplingMap& m, const NoiseModel& noise) {
    config.validate();
    const std::size_t n = target.n_qubits();
    if (m.n_qubits() != n) {
        throw std::invalid_argument("evolve: coupling map and target sizes differ");
    }
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto v = validate(seeds[s], m);
        if (!v.empty()) {
            throw std::invalid_argument("evolve: seed " + std::to_string(s) + " is invalid at gate " +
                                        std::to_string(v.front().gate_index) + ": " + v.front().reason);
        }
    }

    Rng rng(config.seed);
    OperatorContext ctx{m, config, config.max_circuit_len ? config.max_circuit_len : default_max_circuit_len(n), rng};

    std::vector<Circuit> initial;
    for (const auto& s : seeds) {
        if (initial.size() == config.population_size) {
            break;
        }
        initial.push_back(s);
    }
    const std::size_t longest = std::max<std::size_t>(1, std::min(10 * n, ctx.max_len));
    while (initial.size() < config.population_size) {
        initial.push_back(random_circuit(n, rng.between(1, longest), m, rng));
    }

    EvolutionResult result;
    auto& pop = result.population;
    pop.resize(initial.size(), Individual{Circuit(n), {}, 0, 0.0, std::nullopt});
    parallel_for(initial.size(), config.threads, [&](std::size_t i) { pop[i] = evaluate(initial[i], target); });
    nondominated_sort(pop);
    result.logbook.push_back(summarize(pop, 0));
    update_archive(result.archive, pop);

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        const auto before = ctx.truncations;
        pop = next_generation(pop, target, ctx);
        auto record = summarize(pop, gen);
        record.truncations = ctx.truncations - before;
        result.logbook.push_back(record);
        update_archive(result.archive, pop);
    }

    const auto finish = [&](std::vector<Individual>& group) {
        parallel_for(group.size(), config.threads, [&](std::size_t i) {
            group[i] = evaluate(clean(group[i].circuit), target);
            group[i].noisy_fidelity = noisy_fidelity(group[i].circuit, target, noise);
        });
        nondominated_sort(group);
    };
    finish(pop);
    finish(result.archive);
    result.archive = pareto_front(result.archive);
    return result;
}

std::vector<Individual> pareto_front(const std::vector<Individual>& pop) {
    std::vector<Individual> all = pop;
    nondominated_sort(all);
    std::vector<Individual> front;
    for (auto& ind : all) {
        if (ind.rank == 1) {
            front.push_back(std::move(ind));
        }
    }
    std::stable_sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) {
        return a.fitness.cost < b.fitness.cost;
    });
    front.erase(std::unique(front.begin(), front.end(),
                            [](const Individual& a, const Individual& b) { return a.fitness == b.fitness; }),
                front.end());
    return front;
}

}  // namespace aprep
