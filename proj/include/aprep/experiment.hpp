#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aprep/coupling_map.hpp"
#include "aprep/evolution.hpp"
#include "aprep/simulator.hpp"
#include "aprep/state.hpp"

namespace aprep {

struct ExperimentConfig {
    std::size_t n_qubits = 4;
    std::size_t state_count = 20;
    std::string coupling = "falcon-5t-line4";  // preset name or coupling-map file
    GAConfig ga;
    NoiseModel noise;
    std::size_t runs_per_state = 1;
    std::filesystem::path output_dir = "experiment_out";
    std::uint64_t master_seed = 1;
    /// Seed every run with approximate_family(target) besides the exact baseline.
    bool approximate_seeds = true;

    /// Throws std::invalid_argument on bad values or an unreadable coupling file.
    void validate() const;
    CouplingMap coupling_map() const;
};

/// JSON object; absent keys keep their defaults, unknown keys are errors.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

/// Seed for sampling target i, and for GA run r of that target.
std::uint64_t target_seed(std::uint64_t master, std::size_t index);
std::uint64_t run_seed(std::uint64_t target_seed, std::size_t run);

struct StateOutcome {
    std::size_t index = 0;
    bool completed = false;
    std::string error;
    std::size_t baseline_cx = 0;
    double baseline_fidelity = 0.0;
    double baseline_noisy = 0.0;
    double seed_best_noisy = 0.0;  // best noisy fidelity among the initial seeds
    std::size_t ga_best_cx = 0;
    double ga_best_fidelity = 0.0;
    double ga_best_noisy = 0.0;  // front member with the highest noisy fidelity
    double absolute_delta = 0.0;
    double relative_delta = 0.0;
    std::size_t front_size = 0;
};

struct DeltaStats {
    double mean = 0.0;
    double stddev = 0.0;
    double max = 0.0;
};

struct ComparisonReport {
    std::vector<StateOutcome> states;
    std::size_t runs_per_state = 0;
    std::size_t completed = 0;
    std::size_t improved = 0;  // GA best strictly above the baseline
    DeltaStats absolute;
    DeltaStats relative;
};

/// Aggregates over the completed rows.
ComparisonReport make_report(std::vector<StateOutcome> states, std::size_t runs_per_state);
std::string report_json(const ComparisonReport& r);
std::string report_table(const ComparisonReport& r);

/// Everything produced for one target, before anything is written.
struct StateRun {
    StateVector target;
    Circuit baseline;
    std::vector<Circuit> seeds;
    std::vector<EvolutionResult> runs;
    std::vector<Individual> front;  // over all final populations and archives
    StateOutcome outcome;
};

StateRun run_state(const ExperimentConfig& config, const CouplingMap& m, std::size_t index);

/// Runs every state, writes the artifacts under config.output_dir and
/// returns the report. A failing state is logged and marked not completed.
///
///   state_XXXX/target.txt, baseline.circ, front.jsonl, front.csv,
///   logbook_rR.csv
///   report.json, report.txt, histograms.csv, manifest.json
///
/// Only manifest.json carries a timestamp.
ComparisonReport run_experiment(const ExperimentConfig& config);

/// One JSON object per line: circuit, cnot_count, cost, fidelity,
/// noisy_fidelity, rank.
std::string population_jsonl(const std::vector<Individual>& pop);
std::vector<Individual> parse_population_jsonl(std::string_view text);

/// cnot_count,cost,noiseless_f,noisy_f sorted by cnot_count then cost.
/// Members without a noisy fidelity get one from `target` and `noise`.
std::string export_front_csv(const std::vector<Individual>& front, const StateVector& target,
                             const NoiseModel& noise);

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed. Constant data
/// lands in the first bin of a unit-width range.
Histogram histogram(const std::vector<double>& values, std::size_t bins);

/// Maximum-likelihood normal parameters (mean, sigma with divisor N).
std::pair<double, double> gaussian_fit(const std::vector<double>& values);

/// Model curves on l = 0..max cnot_count of `front_csv`:
/// l, then noiseless_<lph> and total_<lph> for every lph.
std::string theory_overlay(std::string_view front_csv, std::size_t n, double p, const std::vector<double>& lph_list);

}  // namespace aprep
