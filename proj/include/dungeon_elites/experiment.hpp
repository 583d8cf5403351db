#pragma once

// Batch runs over parameter sets and their aggregate tables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "archive.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "fitness.hpp"
#include "rng.hpp"

namespace dungeon_elites {

// "rooms-keys-locks-enemies-lc", e.g. "20-4-4-30-2" or "30-6-6-50-1.5".
inline GenerationGoals parse_preset(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, '-');) parts.push_back(p);
    if (parts.size() != 5) throw DungeonError("preset '" + text + "' must have five hyphen-separated fields");
    GenerationGoals g;
    try {
        std::size_t used = 0;
        auto as_int = [&](const std::string& s) {
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        };
        g.rooms = as_int(parts[0]);
        g.keys = as_int(parts[1]);
        g.locks = as_int(parts[2]);
        g.enemies = as_int(parts[3]);
        g.linear_coefficient = std::stod(parts[4], &used);
        if (used != parts[4].size()) throw std::invalid_argument(parts[4]);
    } catch (const std::logic_error&) {
        throw DungeonError("preset '" + text + "' has a non-numeric field");
    }
    validate(g);
    return g;
}

inline std::string preset_label(const GenerationGoals& g) {
    std::ostringstream lc;
    lc << g.linear_coefficient;
    return std::to_string(g.rooms) + "-" + std::to_string(g.keys) + "-" + std::to_string(g.locks) + "-" +
           std::to_string(g.enemies) + "-" + lc.str();
}

inline const std::vector<std::string>& reference_presets() {
    static const std::vector<std::string> sets{"15-3-2-20-2",  "20-4-4-30-1",  "20-4-4-30-2",
                                               "25-8-8-40-2",  "30-4-4-50-2",  "30-6-6-50-1.5"};
    return sets;
}

struct RunArtifact {
    int run_index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::array<std::optional<double>, ElitesArchive::kCells> cells;
    ConvergenceLog log;
    int generations = 0;
    double elapsed_seconds = 0.0;
};

struct CellStats {
    std::size_t occupied_runs = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double occupancy_rate = 0.0;
};

struct ConvergencePoint {
    int generation = 0;
    double best = 0, best_se = 0, mean = 0, mean_se = 0, worst = 0, worst_se = 0;
};

struct ExperimentReport {
    std::string label;
    int runs = 0;
    std::vector<int> failed_runs;
    std::array<CellStats, ElitesArchive::kCells> cells;
    std::vector<ConvergencePoint> convergence;  // up to the shortest successful run
    std::vector<int> generations;               // per run, failed runs = 0
};

namespace detail {

struct MeanSd {
    double mean = 0, sd = 0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd m;
    if (xs.empty()) return m;
    double sum = 0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double acc = 0;
    for (double x : xs) acc += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    return m;
}

}  // namespace detail

// Pure fold over the per-run artifacts.
inline ExperimentReport aggregate(const std::string& label, const std::vector<RunArtifact>& runs) {
    ExperimentReport rep;
    rep.label = label;
    rep.runs = static_cast<int>(runs.size());
    std::vector<const RunArtifact*> ok;
    for (const auto& r : runs) {
        rep.generations.push_back(r.failed ? 0 : r.generations);
        if (r.failed)
            rep.failed_runs.push_back(r.run_index);
        else
            ok.push_back(&r);
    }
    for (int i = 0; i < ElitesArchive::kCells; ++i) {
        std::vector<double> xs;
        for (const auto* r : ok)
            if (const auto& c = r->cells[static_cast<std::size_t>(i)]) xs.push_back(*c);
        const auto m = detail::mean_sd(xs);
        auto& cell = rep.cells[static_cast<std::size_t>(i)];
        cell.occupied_runs = xs.size();
        cell.mean = m.mean;
        cell.stddev = m.sd;
        cell.occupancy_rate = runs.empty() ? 0.0 : static_cast<double>(xs.size()) / static_cast<double>(runs.size());
    }
    if (!ok.empty()) {
        std::size_t len = ok.front()->log.size();
        for (const auto* r : ok) len = std::min(len, r->log.size());
        const double n = static_cast<double>(ok.size());
        for (std::size_t g = 0; g < len; ++g) {
            std::vector<double> best, mean, worst;
            for (const auto* r : ok) {
                best.push_back(r->log[g].best);
                mean.push_back(r->log[g].mean);
                worst.push_back(r->log[g].worst);
            }
            const auto b = detail::mean_sd(best), m = detail::mean_sd(mean), w = detail::mean_sd(worst);
            const double root = std::sqrt(n);
            rep.convergence.push_back({ok.front()->log[g].generation, b.mean, b.sd / root, m.mean, m.sd / root, w.mean,
                                       w.sd / root});
        }
    }
    return rep;
}

// Mean elite fitness over the occupied cells of one leniency row.
inline std::optional<double> row_mean(const ExperimentReport& rep, int leniency_bin) {
    double sum = 0;
    int n = 0;
    for (int e = 0; e < kBinsPerAxis; ++e) {
        const auto& c = rep.cells[static_cast<std::size_t>(BinIndex{leniency_bin, e}.flat())];
        if (c.occupied_runs == 0) continue;
        sum += c.mean;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

inline unsigned worker_count(unsigned requested = 0) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DUNGEON_ELITES_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

inline std::uint64_t run_seed(std::uint64_t master, std::size_t set_index, int run_index) {
    return mix_seed(mix_seed(master, set_index), static_cast<std::uint64_t>(run_index));
}

inline RunArtifact execute_run(const GenerationGoals& goals, EvolutionConfig config, int run_index,
                               const OfferObserver& observer = {}) {
    RunArtifact a;
    a.run_index = run_index;
    a.seed = config.rng_seed;
    try {
        RunResult r = run(goals, config, observer);
        a.cells = r.archive.cell_totals();
        a.log = std::move(r.log);
        a.generations = r.generations;
        a.elapsed_seconds = r.elapsed_seconds;
    } catch (const std::exception& e) {
        a.failed = true;
        a.error = e.what();
    }
    return a;
}

// Independent seeded runs for every set, spread over a worker pool. Results
// are ordered by (set, run) regardless of scheduling.
inline std::vector<std::vector<RunArtifact>> run_sweep(const std::vector<GenerationGoals>& sets, int runs,
                                                       const EvolutionConfig& base, std::uint64_t master_seed,
                                                       unsigned threads = 0) {
    std::vector<std::vector<RunArtifact>> out(sets.size(), std::vector<RunArtifact>(static_cast<std::size_t>(runs)));
    const std::size_t jobs = sets.size() * static_cast<std::size_t>(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            const std::size_t s = j / static_cast<std::size_t>(runs);
            const int r = static_cast<int>(j % static_cast<std::size_t>(runs));
            EvolutionConfig cfg = base;
            cfg.rng_seed = run_seed(master_seed, s, r);
            out[s][static_cast<std::size_t>(r)] = execute_run(sets[s], cfg, r);
        }
    };
    const unsigned n = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace detail

// Rows L1..L5, columns E1..E5, cells "mean±std" ("-" when never occupied).
inline std::string cells_csv(const ExperimentReport& rep) {
    std::ostringstream s;
    s << "leniency,E1,E2,E3,E4,E5\n";
    for (int l = 0; l < kBinsPerAxis; ++l) {
        s << 'L' << l + 1;
        for (int e = 0; e < kBinsPerAxis; ++e) {
            const auto& c = rep.cells[static_cast<std::size_t>(BinIndex{l, e}.flat())];
            s << ',';
            if (c.occupied_runs == 0)
                s << '-';
            else
                s << detail::fixed(c.mean) << "\xC2\xB1" << detail::fixed(c.stddev);
        }
        s << '\n';
    }
    return s.str();
}

inline std::string occupancy_csv(const ExperimentReport& rep) {
    std::ostringstream s;
    s << "leniency,E1,E2,E3,E4,E5\n";
    for (int l = 0; l < kBinsPerAxis; ++l) {
        s << 'L' << l + 1;
        for (int e = 0; e < kBinsPerAxis; ++e)
            s << ',' << detail::fixed(rep.cells[static_cast<std::size_t>(BinIndex{l, e}.flat())].occupancy_rate, 3);
        s << '\n';
    }
    return s.str();
}

inline std::string convergence_csv(const ExperimentReport& rep) {
    std::ostringstream s;
    s << "generation,best,best_se,mean,mean_se,worst,worst_se\n";
    s << std::setprecision(10);
    for (const auto& p : rep.convergence)
        s << p.generation << ',' << p.best << ',' << p.best_se << ',' << p.mean << ',' << p.mean_se << ',' << p.worst
          << ',' << p.worst_se << '\n';
    return s.str();
}

inline std::string summary_table(const ExperimentReport& rep) {
    std::ostringstream s;
    s << "### " << rep.label << " (" << rep.runs << " runs";
    if (!rep.failed_runs.empty()) s << ", " << rep.failed_runs.size() << " failed";
    s << ")\n\n|    | E1 | E2 | E3 | E4 | E5 |\n|----|----|----|----|----|----|\n";
    for (int l = 0; l < kBinsPerAxis; ++l) {
        s << "| L" << l + 1 << " |";
        for (int e = 0; e < kBinsPerAxis; ++e) {
            const auto& c = rep.cells[static_cast<std::size_t>(BinIndex{l, e}.flat())];
            if (c.occupied_runs == 0)
                s << " - |";
            else
                s << ' ' << detail::fixed(c.mean) << " ± " << detail::fixed(c.stddev) << " |";
        }
        s << '\n';
    }
    return s.str();
}

// Everything deterministic about the sweep. Wall-clock figures are confined
// to the "metadata" object.
inline nlohmann::json report_json(const ExperimentReport& rep, const std::vector<RunArtifact>& runs) {
    using nlohmann::json;
    json cells = json::array();
    for (int i = 0; i < ElitesArchive::kCells; ++i) {
        const auto& c = rep.cells[static_cast<std::size_t>(i)];
        cells.push_back({{"cell", BinIndex::from_flat(i).label()},
                         {"occupied_runs", c.occupied_runs},
                         {"occupancy_rate", c.occupancy_rate},
                         {"mean", c.mean},
                         {"std", c.stddev}});
    }
    json run_list = json::array();
    json timing = json::array();
    for (const auto& r : runs) {
        json j = {{"run", r.run_index}, {"seed", r.seed}, {"generations", r.generations}, {"failed", r.failed}};
        if (r.failed) j["error"] = r.error;
        run_list.push_back(std::move(j));
        timing.push_back(r.elapsed_seconds);
    }
    return {{"parameter_set", rep.label},
            {"runs", rep.runs},
            {"failed_runs", rep.failed_runs},
            {"cells", std::move(cells)},
            {"run_list", std::move(run_list)},
            {"metadata",
             {{"hardware_threads", std::thread::hardware_concurrency()},
              {"worker_threads", worker_count()},
              {"elapsed_seconds", std::move(timing)}}}};
}

}  // namespace dungeon_elites
