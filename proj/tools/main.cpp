#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aprep/baseline.hpp"
#include "aprep/experiment.hpp"
#include "aprep/haar.hpp"
#include "aprep/theory.hpp"
#include "json.hpp"

using namespace aprep;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

NoiseModel parse_noise(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("--noise expects p1,p2");
    }
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

struct Globals {
    std::string config;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string out;
    std::size_t threads = 1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate state preparation with a multi-objective genetic algorithm"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON experiment config")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out, "output file or directory");
    app.add_option("--threads", g.threads, "evaluation threads")->check(CLI::PositiveNumber);

    // sample-states
    auto* sample = app.add_subcommand("sample-states", "write Haar-random target states");
    std::size_t sample_n = 4, sample_count = 20;
    sample->add_option("-n,--qubits", sample_n)->check(CLI::Range(1, 12));
    sample->add_option("--count", sample_count)->check(CLI::PositiveNumber);

    // prepare-baseline
    auto* prep = app.add_subcommand("prepare-baseline", "exact preparation circuit for a target");
    std::string target_path, coupling = "falcon-5t-line4";
    prep->add_option("--target", target_path)->required()->check(CLI::ExistingFile);
    prep->add_option("--coupling", coupling, "preset name or coupling-map file");

    // evolve
    auto* evo = app.add_subcommand("evolve", "run the genetic algorithm on one target");
    GAConfig ga;
    std::string noise_text = "0.00088,0.0088", seeding = "family";
    evo->add_option("--target", target_path)->required()->check(CLI::ExistingFile);
    evo->add_option("--coupling", coupling);
    evo->add_option("--population", ga.population_size);
    evo->add_option("--generations", ga.generations);
    evo->add_option("--emc", ga.emc);
    evo->add_option("--cmw", ga.cmw);
    evo->add_option("--esl", ga.esl);
    evo->add_option("--elite-fraction", ga.elite_fraction);
    evo->add_option("--max-length", ga.max_circuit_len, "0 picks the default");
    evo->add_option("--noise", noise_text, "p1,p2");
    evo->add_option("--seeding", seeding, "initial circuits besides random ones")
        ->check(CLI::IsMember({"none", "exact", "family"}));

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "fidelities of a circuit against a target");
    std::string circuit_path;
    eval->add_option("--target", target_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--circuit", circuit_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--coupling", coupling, "also validate against this map");
    eval->add_option("--noise", noise_text, "p1,p2");

    // theory
    auto* theo = app.add_subcommand("theory", "model curves, or fit l_ph to a front");
    std::size_t theory_n = 5, theory_lmax = 100;
    double theory_p = 0.0088;
    std::vector<double> lph_list{1.8, 2.8, 3.8, 4.8, 5.8};
    std::string fit_path;
    theo->add_option("-n,--qubits", theory_n)->check(CLI::Range(2, 60));
    theo->add_option("-p,--error-rate", theory_p);
    theo->add_option("--lph", lph_list)->delimiter(',');
    theo->add_option("--lmax", theory_lmax);
    theo->add_option("--fit", fit_path, "front JSONL: print the fitted l_ph")->check(CLI::ExistingFile);

    // report
    auto* rep = app.add_subcommand("report", "full experiment: targets, baselines, GA runs, comparison report");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        if (sample->parsed()) {
            const fs::path dir = g.out.empty() ? "states" : g.out;
            fs::create_directories(dir);
            for (std::size_t i = 0; i < sample_count; ++i) {
                Rng rng(target_seed(g.seed, i));
                char name[32];
                std::snprintf(name, sizeof name, "state_%04zu.txt", i);
                spit(dir / name, format_state(sample_haar_state(sample_n, rng)));
            }
            const nlohmann::json manifest{{"n_qubits", sample_n}, {"count", sample_count}, {"master_seed", g.seed}};
            spit(dir / "manifest.json", manifest.dump(2) + "\n");
            return 0;
        }
        if (prep->parsed()) {
            const auto target = parse_state(slurp(target_path));
            const auto m = coupling::load(coupling);
            const auto c = exact_prepare(target, m);
            if (!g.out.empty()) {
                spit(g.out, serialize(c));
            } else {
                std::cout << serialize(c);
            }
            std::printf("cx=%zu cost=%zu fidelity=%.17g\n", cnot_count(c), cost(c),
                        fidelity_pure(prepare(c), target));
            return 0;
        }
        if (evo->parsed()) {
            const auto target = parse_state(slurp(target_path));
            const auto m = coupling::load(coupling);
            const auto noise = parse_noise(noise_text);
            ga.seed = g.seed;
            ga.threads = g.threads;
            std::vector<Circuit> seeds;
            if (seeding != "none") {
                seeds.push_back(exact_prepare(target, m));
            }
            if (seeding == "family") {
                for (auto& c : approximate_family(target, m)) {
                    seeds.push_back(std::move(c));
                }
            }
            const auto result = evolve(target, seeds, ga, m, noise);
            const fs::path dir = g.out.empty() ? "evolve_out" : g.out;
            fs::create_directories(dir);
            spit(dir / "final_population.jsonl", population_jsonl(result.population));
            spit(dir / "archive.jsonl", population_jsonl(result.archive));
            spit(dir / "logbook.csv", logbook_csv(result.logbook));
            auto merged = result.population;
            merged.insert(merged.end(), result.archive.begin(), result.archive.end());
            spit(dir / "front.csv", export_front_csv(pareto_front(merged), target, noise));
            return 0;
        }
        if (eval->parsed()) {
            const auto target = parse_state(slurp(target_path));
            const auto c = deserialize(slurp(circuit_path));
            int status = 0;
            if (eval->count("--coupling")) {
                const auto violations = validate(c, coupling::load(coupling));
                for (const auto& v : violations) {
                    std::fprintf(stderr, "gate %zu: %s\n", v.gate_index, v.reason.c_str());
                }
                status = violations.empty() ? 0 : 1;
            }
            std::printf("cx=%zu cost=%zu fidelity=%.17g noisy_fidelity=%.17g\n", cnot_count(c), cost(c),
                        fidelity_pure(prepare(c), target), noisy_fidelity(c, target, parse_noise(noise_text)));
            return status;
        }
        if (theo->parsed()) {
            if (!fit_path.empty()) {
                std::vector<std::pair<double, double>> pts;
                for (const auto& ind : parse_population_jsonl(slurp(fit_path))) {
                    pts.emplace_back(static_cast<double>(cnot_count(ind.circuit)), ind.fitness.fidelity);
                }
                const auto lin = theory::fit_log_infidelity(pts);
                std::printf("lph=%.6f slope=%.6f intercept=%.6f r2=%.6f points=%zu\n",
                            theory::fit_lph(pts, theory_n), lin.slope, lin.intercept, lin.r_squared, lin.points);
                return 0;
            }
            std::string csv = "l,lph,noiseless_bound,total_fidelity\n";
            std::string summary;
            char buf[256];
            for (double lph : lph_list) {
                const theory::TheoryParams t{theory_n, theory_p, lph};
                for (std::size_t l = 0; l <= theory_lmax; ++l) {
                    const double eps = theory::epsilon_bound(theory_n, static_cast<double>(l), lph);
                    std::snprintf(buf, sizeof buf, "%zu,%g,%.17g,%.17g\n", l, lph, 1.0 - eps * eps,
                                  theory::total_fidelity(t, static_cast<double>(l)));
                    csv += buf;
                }
                const auto opt = theory::optimal_length(t);
                std::snprintf(buf, sizeof buf, "# lph=%g l_star=%zu f_max=%.6f l_continuous=%.4f l_closed_form=%.4f%s\n",
                              lph, opt.l_star, opt.f_max, opt.l_continuous, opt.l_closed_form,
                              opt.noise_too_high ? " noise_too_high" : "");
                summary += buf;
            }
            if (!g.out.empty()) {
                spit(g.out, csv);
            } else {
                std::cout << csv;
            }
            std::cout << summary;
            return 0;
        }
        if (rep->parsed()) {
            ExperimentConfig config = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
            if (g.seed_set) {
                config.master_seed = g.seed;
            }
            if (!g.out.empty()) {
                config.output_dir = g.out;
            }
            if (app.count("--threads")) {
                config.ga.threads = g.threads;
            }
            const auto report = run_experiment(config);
            std::cout << report_table(report);
            return report.completed == report.states.size() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
