#include "aprep/experiment.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aprep/baseline.hpp"
#include "aprep/haar.hpp"
#include "aprep/rng.hpp"
#include "aprep/theory.hpp"
#include "json.hpp"

namespace aprep {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string state_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "state_%04zu", index);
    return buf;
}

json config_to_json(const ExperimentConfig& c) {
    return json{{"n_qubits", c.n_qubits},
                {"state_count", c.state_count},
                {"coupling", c.coupling},
                {"population_size", c.ga.population_size},
                {"generations", c.ga.generations},
                {"emc", c.ga.emc},
                {"cmw", c.ga.cmw},
                {"esl", c.ga.esl},
                {"elite_fraction", c.ga.elite_fraction},
                {"max_circuit_len", c.ga.max_circuit_len},
                {"threads", c.ga.threads},
                {"p1", c.noise.p1},
                {"p2", c.noise.p2},
                {"runs_per_state", c.runs_per_state},
                {"output_dir", c.output_dir.string()},
                {"master_seed", c.master_seed},
                {"approximate_seeds", c.approximate_seeds}};
}

json outcome_to_json(const StateOutcome& s) {
    json j{{"index", s.index}, {"completed", s.completed}};
    if (!s.completed) {
        j["error"] = s.error;
        return j;
    }
    j["baseline_cx"] = s.baseline_cx;
    j["baseline_fidelity"] = s.baseline_fidelity;
    j["baseline_noisy"] = s.baseline_noisy;
    j["seed_best_noisy"] = s.seed_best_noisy;
    j["ga_best_cx"] = s.ga_best_cx;
    j["ga_best_fidelity"] = s.ga_best_fidelity;
    j["ga_best_noisy"] = s.ga_best_noisy;
    j["absolute_delta"] = s.absolute_delta;
    j["relative_delta"] = s.relative_delta;
    j["front_size"] = s.front_size;
    return j;
}

json stats_to_json(const DeltaStats& d) { return json{{"mean", d.mean}, {"stddev", d.stddev}, {"max", d.max}}; }

DeltaStats stats_of(const std::vector<double>& v) {
    DeltaStats d;
    if (v.empty()) {
        return d;
    }
    const auto [mean, sigma] = gaussian_fit(v);
    d.mean = mean;
    d.stddev = sigma;
    d.max = *std::max_element(v.begin(), v.end());
    return d;
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_qubits < 1 || n_qubits > 12) {
        throw std::invalid_argument("n_qubits must be in [1, 12]");
    }
    if (state_count < 1) {
        throw std::invalid_argument("state_count must be at least 1");
    }
    if (runs_per_state < 1) {
        throw std::invalid_argument("runs_per_state must be at least 1");
    }
    if (!(noise.p1 >= 0.0 && noise.p1 <= 1.0 && noise.p2 >= 0.0 && noise.p2 <= 1.0)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
    ga.validate();
    if (coupling_map().n_qubits() != n_qubits) {
        throw std::invalid_argument("coupling map '" + coupling + "' does not have n_qubits qubits");
    }
}

CouplingMap ExperimentConfig::coupling_map() const { return coupling::load(coupling); }

ExperimentConfig parse_config(std::string_view json_text) {
    const json j = json::parse(json_text);
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    ExperimentConfig c;
    static const std::set<std::string> known = {
        "n_qubits", "state_count", "coupling",        "population_size", "generations",    "emc",
        "cmw",      "esl",         "elite_fraction",  "max_circuit_len", "threads",        "p1",
        "p2",       "runs_per_state", "output_dir",   "master_seed",     "approximate_seeds"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        }
    };
    get("n_qubits", c.n_qubits);
    get("state_count", c.state_count);
    get("coupling", c.coupling);
    get("population_size", c.ga.population_size);
    get("generations", c.ga.generations);
    get("emc", c.ga.emc);
    get("cmw", c.ga.cmw);
    get("esl", c.ga.esl);
    get("elite_fraction", c.ga.elite_fraction);
    get("max_circuit_len", c.ga.max_circuit_len);
    get("threads", c.ga.threads);
    get("p1", c.noise.p1);
    get("p2", c.noise.p2);
    get("runs_per_state", c.runs_per_state);
    get("master_seed", c.master_seed);
    get("approximate_seeds", c.approximate_seeds);
    if (j.contains("output_dir")) {
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    auto c = parse_config(read_file(path));
    // Relative coupling files are resolved against the config's directory.
    if (!c.coupling.empty() && c.coupling.find('/') != std::string::npos) {
        const std::filesystem::path p(c.coupling);
        if (p.is_relative()) {
            c.coupling = (path.parent_path() / p).string();
        }
    }
    return c;
}

std::string format_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::uint64_t target_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

std::uint64_t run_seed(std::uint64_t target_seed, std::size_t run) { return derive_seed(target_seed, 1 + run); }

ComparisonReport make_report(std::vector<StateOutcome> states, std::size_t runs_per_state) {
    ComparisonReport r;
    r.states = std::move(states);
    r.runs_per_state = runs_per_state;
    std::vector<double> abs, rel;
    for (const auto& s : r.states) {
        if (!s.completed) {
            continue;
        }
        ++r.completed;
        r.improved += s.ga_best_noisy > s.baseline_noisy ? 1 : 0;
        abs.push_back(s.absolute_delta);
        rel.push_back(s.relative_delta);
    }
    r.absolute = stats_of(abs);
    r.relative = stats_of(rel);
    return r;
}

std::string report_json(const ComparisonReport& r) {
    json states = json::array();
    for (const auto& s : r.states) {
        states.push_back(outcome_to_json(s));
    }
    const json j{{"states", states},
                 {"state_count", r.states.size()},
                 {"runs_per_state", r.runs_per_state},
                 {"completed", r.completed},
                 {"improved", r.improved},
                 {"absolute_delta", stats_to_json(r.absolute)},
                 {"relative_delta", stats_to_json(r.relative)}};
    return j.dump(2) + "\n";
}

std::string report_table(const ComparisonReport& r) {
    std::string out;
    char buf[256];
    out += "state  base_cx  base_noisy  seed_noisy  ga_cx  ga_noisy    abs_delta   rel_delta\n";
    for (const auto& s : r.states) {
        if (!s.completed) {
            std::snprintf(buf, sizeof buf, "%5zu  skipped: %s\n", s.index, s.error.c_str());
        } else {
            std::snprintf(buf, sizeof buf, "%5zu  %7zu  %10.6f  %10.6f  %5zu  %8.6f  %+11.6f  %+9.2f%%\n", s.index,
                          s.baseline_cx, s.baseline_noisy, s.seed_best_noisy, s.ga_best_cx, s.ga_best_noisy,
                          s.absolute_delta, 100.0 * s.relative_delta);
        }
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "\ncompleted %zu of %zu states, %zu runs per state, GA above baseline in %zu\n",
                  r.completed, r.states.size(), r.runs_per_state, r.improved);
    out += buf;
    std::snprintf(buf, sizeof buf, "absolute delta: mean %+.6f  sigma %.6f  max %+.6f\n", r.absolute.mean,
                  r.absolute.stddev, r.absolute.max);
    out += buf;
    std::snprintf(buf, sizeof buf, "relative delta: mean %+.2f%%  sigma %.2f%%  max %+.2f%%\n", 100.0 * r.relative.mean,
                  100.0 * r.relative.stddev, 100.0 * r.relative.max);
    out += buf;
    return out;
}

StateRun run_state(const ExperimentConfig& config, const CouplingMap& m, std::size_t index) {
    const auto tseed = target_seed(config.master_seed, index);
    Rng rng(tseed);
    StateRun run{sample_haar_state(config.n_qubits, rng), Circuit(config.n_qubits), {}, {}, {}, {}};
    run.baseline = exact_prepare(run.target, m);
    run.seeds.push_back(run.baseline);
    if (config.approximate_seeds) {
        for (auto& c : approximate_family(run.target, m)) {
            run.seeds.push_back(std::move(c));
        }
    }

    auto& o = run.outcome;
    o.index = index;
    o.baseline_cx = cnot_count(run.baseline);
    o.baseline_fidelity = fidelity_pure(prepare(run.baseline), run.target);
    o.baseline_noisy = noisy_fidelity(run.baseline, run.target, config.noise);
    o.seed_best_noisy = o.baseline_noisy;
    for (std::size_t i = 1; i < run.seeds.size(); ++i) {
        o.seed_best_noisy = std::max(o.seed_best_noisy, noisy_fidelity(run.seeds[i], run.target, config.noise));
    }

    std::vector<Individual> merged;
    for (std::size_t r = 0; r < config.runs_per_state; ++r) {
        GAConfig ga = config.ga;
        ga.seed = run_seed(tseed, r);
        run.runs.push_back(evolve(run.target, run.seeds, ga, m, config.noise));
        const auto& res = run.runs.back();
        merged.insert(merged.end(), res.population.begin(), res.population.end());
        merged.insert(merged.end(), res.archive.begin(), res.archive.end());
    }
    run.front = pareto_front(merged);

    const Individual* best = nullptr;
    for (const auto& ind : run.front) {
        if (!best || *ind.noisy_fidelity > *best->noisy_fidelity) {
            best = &ind;
        }
    }
    o.ga_best_cx = cnot_count(best->circuit);
    o.ga_best_fidelity = best->fitness.fidelity;
    o.ga_best_noisy = *best->noisy_fidelity;
    o.absolute_delta = o.ga_best_noisy - o.baseline_noisy;
    o.relative_delta = o.absolute_delta / o.baseline_noisy;
    o.front_size = run.front.size();
    o.completed = true;
    return run;
}

ComparisonReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto m = config.coupling_map();
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    const std::string started = iso_now();

    std::vector<StateOutcome> outcomes;
    for (std::size_t i = 0; i < config.state_count; ++i) {
        const auto sdir = dir / state_dir_name(i);
        try {
            auto run = run_state(config, m, i);
            std::filesystem::create_directories(sdir);
            write_file(sdir / "target.txt", format_state(run.target));
            write_file(sdir / "baseline.circ", serialize(run.baseline));
            write_file(sdir / "front.jsonl", population_jsonl(run.front));
            write_file(sdir / "front.csv", export_front_csv(run.front, run.target, config.noise));
            for (std::size_t r = 0; r < run.runs.size(); ++r) {
                write_file(sdir / ("logbook_r" + std::to_string(r) + ".csv"), logbook_csv(run.runs[r].logbook));
            }
            const auto& o = run.outcome;
            spdlog::info("state {}: baseline {:.6f} ({} CX), GA {:.6f} ({} CX)", i, o.baseline_noisy, o.baseline_cx,
                         o.ga_best_noisy, o.ga_best_cx);
            outcomes.push_back(run.outcome);
        } catch (const std::exception& e) {
            spdlog::error("state {} skipped: {}", i, e.what());
            StateOutcome o;
            o.index = i;
            o.error = e.what();
            outcomes.push_back(o);
        }
    }

    auto report = make_report(std::move(outcomes), config.runs_per_state);
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "report.txt", report_table(report));

    std::vector<double> abs, rel, base, ga;
    for (const auto& s : report.states) {
        if (s.completed) {
            abs.push_back(s.absolute_delta);
            rel.push_back(s.relative_delta);
            base.push_back(s.baseline_noisy);
            ga.push_back(s.ga_best_noisy);
        }
    }
    std::string hist = "series,bin_low,bin_high,count\n";
    const std::pair<const char*, const std::vector<double>*> series[] = {
        {"absolute_delta", &abs}, {"relative_delta", &rel}, {"baseline_noisy", &base}, {"ga_noisy", &ga}};
    for (const auto& [name, values] : series) {
        if (values->empty()) {
            continue;
        }
        const auto h = histogram(*values, 20);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            hist += std::string(name) + "," + fmt_double(h.edges[b]) + "," + fmt_double(h.edges[b + 1]) + "," +
                    std::to_string(h.counts[b]) + "\n";
        }
    }
    write_file(dir / "histograms.csv", hist);

    const json manifest{{"config", config_to_json(config)},
                        {"started", started},
                        {"finished", iso_now()},
                        {"states", config.state_count},
                        {"completed", report.completed}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

std::string population_jsonl(const std::vector<Individual>& pop) {
    std::string out;
    for (const auto& ind : pop) {
        json j{{"circuit", serialize(ind.circuit)},
               {"cnot_count", cnot_count(ind.circuit)},
               {"cost", ind.fitness.cost},
               {"fidelity", ind.fitness.fidelity},
               {"rank", ind.rank}};
        j["noisy_fidelity"] = ind.noisy_fidelity ? json(*ind.noisy_fidelity) : json(nullptr);
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Individual> parse_population_jsonl(std::string_view text) {
    std::vector<Individual> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            Individual ind{deserialize(j.at("circuit").get<std::string>()), {}, 0, 0.0, std::nullopt};
            ind.fitness.cost = j.at("cost").get<std::size_t>();
            ind.fitness.fidelity = j.at("fidelity").get<double>();
            ind.rank = j.value("rank", std::size_t{0});
            if (j.contains("noisy_fidelity") && !j.at("noisy_fidelity").is_null()) {
                ind.noisy_fidelity = j.at("noisy_fidelity").get<double>();
            }
            out.push_back(std::move(ind));
        } catch (const std::exception& e) {
            throw std::invalid_argument("population line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string export_front_csv(const std::vector<Individual>& front, const StateVector& target,
                             const NoiseModel& noise) {
    struct Row {
        std::size_t cx, cost;
        double f, noisy;
    };
    std::vector<Row> rows;
    for (const auto& ind : front) {
        const double noisy = ind.noisy_fidelity ? *ind.noisy_fidelity : noisy_fidelity(ind.circuit, target, noise);
        rows.push_back({cnot_count(ind.circuit), ind.fitness.cost, ind.fitness.fidelity, noisy});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.cx != b.cx ? a.cx < b.cx : a.cost < b.cost; });
    std::string out = "cnot_count,cost,noiseless_f,noisy_f\n";
    for (const auto& r : rows) {
        out += std::to_string(r.cx) + "," + std::to_string(r.cost) + "," + fmt_double(r.f) + "," +
               fmt_double(r.noisy) + "\n";
    }
    return out;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("histogram: bins must be positive");
    }
    if (values.empty()) {
        throw std::invalid_argument("histogram: no values");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    Histogram h;
    for (std::size_t b = 0; b <= bins; ++b) {
        h.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
    }
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

std::pair<double, double> gaussian_fit(const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("gaussian_fit: no values");
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

std::string theory_overlay(std::string_view front_csv, std::size_t n, double p, const std::vector<double>& lph_list) {
    std::istringstream in{std::string(front_csv)};
    std::string line;
    std::getline(in, line);
    if (line.rfind("cnot_count", 0) != 0) {
        throw std::invalid_argument("theory_overlay: front CSV must start with a cnot_count header");
    }
    std::size_t max_l = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            max_l = std::max<std::size_t>(max_l, std::stoul(line.substr(0, line.find(','))));
        }
    }
    std::string out = "l";
    for (double lph : lph_list) {
        char label[32];
        std::snprintf(label, sizeof label, "%.6g", lph);
        out += std::string(",noiseless_") + label + ",total_" + label;
    }
    out += "\n";
    for (std::size_t l = 0; l <= max_l; ++l) {
        out += std::to_string(l);
        for (double lph : lph_list) {
            const double l_d = static_cast<double>(l);
            const double eps = theory::epsilon_bound(n, l_d, lph);
            out += "," + fmt_double(1.0 - eps * eps) + "," + fmt_double(theory::total_fidelity({n, p, lph}, l_d));
        }
        out += "\n";
    }
    return out;
}

}  // namespace aprep
