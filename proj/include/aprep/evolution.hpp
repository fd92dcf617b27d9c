#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aprep/circuit.hpp"
#include "aprep/coupling_map.hpp"
#include "aprep/rng.hpp"
#include "aprep/simulator.hpp"
#include "aprep/state.hpp"

namespace aprep {

struct Fitness {
    std::size_t cost = 0;
    double fidelity = 0.0;
    friend bool operator==(const Fitness&, const Fitness&) = default;
};

/// a dominates b: at least as good on both objectives and strictly better on one.
bool dominates(const Fitness& a, const Fitness& b);

struct Individual {
    Circuit circuit;
    Fitness fitness;
    std::size_t rank = 0;  // 0 while unranked
    double crowding = 0.0;
    std::optional<double> noisy_fidelity;
};

Individual evaluate(Circuit c, const StateVector& target);

struct GAConfig {
    std::size_t population_size = 100;
    std::size_t generations = 2000;
    double emc = 2.0;
    double cmw = 2.0;
    double esl = 2.0;
    double elite_fraction = 0.1;
    std::size_t max_circuit_len = 0;  // 0 selects default_max_circuit_len(n)
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// 20 * cnot_upper_bound(n), or 20 for a single qubit.
std::size_t default_max_circuit_len(std::size_t n);

struct LogRecord {
    std::size_t generation = 0;
    double min_fidelity = 0.0;
    double mean_fidelity = 0.0;
    double max_fidelity = 0.0;
    std::size_t min_cost = 0;
    double mean_cost = 0.0;
    std::size_t max_cost = 0;
    std::size_t front_size = 0;
    std::size_t truncations = 0;  // offspring cut back to max_circuit_len
};

using Logbook = std::vector<LogRecord>;

std::string logbook_csv(const Logbook& log);

/// State shared by the evolutionary operators of one run.
struct OperatorContext {
    const CouplingMap& map;
    const GAConfig& config;
    std::size_t max_len;
    Rng& rng;
    std::size_t truncations = 0;
};

/// Operator numbering follows the list of 13 operators; index 0..12.
inline constexpr std::size_t kOperatorCount = 13;

/// Per-gate mutation probability min(1, emc / l).
double mutation_probability(double emc, std::size_t length);
/// Gaussian width for angle mutation: cmw / max(sqrt(1 - F), 1e-3).
double continuous_sigma(double cmw, double fidelity);

/// Draws a sequence length from the geometric distribution with mean `esl`.
std::size_t sequence_length(double esl, Rng& rng);
std::vector<Gate> random_sequence(std::size_t length, const CouplingMap& m, std::span<const std::size_t> layout,
                                  Rng& rng);
/// Reversed sequence of gate inverses.
std::vector<Gate> inverse_sequence(const std::vector<Gate>& seq);

/// Replaces every CX that is not on a coupling edge under the circuit's layout
/// by a random legal CX.
Circuit repair(const Circuit& c, const CouplingMap& m, Rng& rng);
/// Cuts the gate list back to ctx.max_len, counting the event.
Circuit truncate(const Circuit& c, OperatorContext& ctx);

/// Rewires one gate to a different qubit (single-qubit kinds) or a different
/// coupling edge or direction (CX) whenever an alternative exists.
Gate rewire(const Gate& g, std::span<const std::size_t> layout, OperatorContext& ctx);

Circuit op1_discrete_uniform_mutation(const Circuit& c, OperatorContext& ctx);
Circuit op2_continuous_uniform_mutation(const Circuit& c, double fidelity, OperatorContext& ctx);
Circuit op3_move_gate(const Circuit& c, OperatorContext& ctx);
Circuit op4_insert_mutate_invert(const Circuit& c, OperatorContext& ctx);
Circuit op5_sequence_insertion(const Circuit& c, OperatorContext& ctx);
Circuit op6_sequence_and_inverse_insertion(const Circuit& c, OperatorContext& ctx);
Circuit op7_sequence_deletion(const Circuit& c, OperatorContext& ctx);
Circuit op8_sequence_replacement(const Circuit& c, OperatorContext& ctx);
Circuit op9_sequence_swap(const Circuit& c, OperatorContext& ctx);
Circuit op10_sequence_scramble(const Circuit& c, OperatorContext& ctx);
std::pair<Circuit, Circuit> op11_crossover(const Circuit& a, const Circuit& b, OperatorContext& ctx);
Circuit op12_permutation_mutation(const Circuit& c, OperatorContext& ctx);
Circuit op13_clean(const Circuit& c);

/// NSGA-2 fast non-dominated sort. Sets rank (1-based) and crowding distance
/// on every individual and returns the fronts as index lists.
std::vector<std::vector<std::size_t>> nondominated_sort(std::vector<Individual>& pop);

/// Rank drawn with probability proportional to e^{-rank} over the occupied
/// ranks, then a uniform member of that rank. Returns an index into `pop`.
std::size_t select_parent(const std::vector<Individual>& pop, Rng& rng);

/// Elites plus offspring, evaluated and ranked. `pop` must be ranked.
std::vector<Individual> next_generation(const std::vector<Individual>& pop, const StateVector& target,
                                        OperatorContext& ctx);

LogRecord summarize(const std::vector<Individual>& pop, std::size_t generation);

struct EvolutionResult {
    std::vector<Individual> population;
    /// Every non-dominated fitness seen during the run, as a pareto_front.
    std::vector<Individual> archive;
    Logbook logbook;
};

/// Merges the rank-1 members of a ranked `pop` into `archive` and keeps the
/// non-dominated, fitness-distinct part. Earlier entries win ties.
void update_archive(std::vector<Individual>& archive, const std::vector<Individual>& pop);

/// Full run: seeds plus random circuits, `config.generations` generations,
/// then every individual of the population and the archive is cleaned,
/// re-evaluated, given a noisy fidelity and ranked again. The archive does not
/// influence selection. Throws std::invalid_argument if a seed is not valid on
/// `m`.
EvolutionResult evolve(const StateVector& target, const std::vector<Circuit>& seeds, const GAConfig& config,
                       const CouplingMap& m, const NoiseModel& noise);

/// Non-dominated members sorted by cost, one per distinct fitness.
std::vector<Individual> pareto_front(const std::vector<Individual>& pop);

}  // namespace aprep
