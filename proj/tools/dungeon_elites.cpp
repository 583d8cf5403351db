// Command-line front end: generate, render, validate, experiment.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dungeon_elites/dungeon_elites.hpp>

namespace fs = std::filesystem;
using namespace dungeon_elites;

namespace {

struct GoalFlags {
    std::optional<std::string> preset;
    std::optional<int> rooms, keys, locks, enemies;
    std::optional<double> lc;

    void attach(CLI::App& app) {
        app.add_option("--preset", preset, "rooms-keys-locks-enemies-lc, e.g. 20-4-4-30-2");
        app.add_option("--rooms", rooms, "number of rooms");
        app.add_option("--keys", keys, "number of keys");
        app.add_option("--locks", locks, "number of locks");
        app.add_option("--enemies", enemies, "number of enemies");
        app.add_option("--lc", lc, "linear coefficient");
    }

    GenerationGoals resolve() const {
        GenerationGoals g = preset ? parse_preset(*preset) : GenerationGoals{};
        if (rooms) g.rooms = *rooms;
        if (keys) g.keys = *keys;
        if (locks) g.locks = *locks;
        if (enemies) g.enemies = *enemies;
        if (lc) g.linear_coefficient = *lc;
        validate(g);
        return g;
    }
};

struct RunFlags {
    std::uint64_t seed = 1;
    double seconds = 60.0;
    std::optional<int> generations;
    double mutation_rate = 0.15;

    void attach(CLI::App& app) {
        app.add_option("--seed", seed, "random seed")->capture_default_str();
        app.add_option("--time", seconds, "time budget in seconds")->capture_default_str();
        app.add_option("--generations", generations, "stop after this many generations (overrides --time)");
        app.add_option("--mutation-rate", mutation_rate, "mutation probability")->capture_default_str();
    }

    EvolutionConfig resolve() const {
        EvolutionConfig c;
        c.rng_seed = seed;
        c.mutation_rate = mutation_rate;
        if (generations) {
            c.max_generations = *generations;
            c.time_budget.reset();
        } else {
            c.time_budget = std::chrono::duration<double>(seconds);
        }
        return c;
    }
};

void print_occupancy(const ElitesArchive& archive) {
    std::cout << "      E1     E2     E3     E4     E5\n";
    for (int l = 0; l < kBinsPerAxis; ++l) {
        std::cout << 'L' << l + 1;
        for (int e = 0; e < kBinsPerAxis; ++e) {
            const auto& c = archive.cell({l, e});
            if (c)
                std::cout << std::setw(7) << std::fixed << std::setprecision(2) << c->fitness.total;
            else
                std::cout << "      .";
        }
        std::cout << '\n';
    }
}

int cmd_generate(const GoalFlags& gf, const RunFlags& rf, const std::string& out_dir) {
    const GenerationGoals goals = gf.resolve();
    const EvolutionConfig config = rf.resolve();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        std::cerr << "error: cannot create output directory " << out_dir << ": " << ec.message() << '\n';
        return 1;
    }
    RunResult result;
    try {
        result = run(goals, config);
    } catch (const InitExhausted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    for (const auto& [b, elite] : result.archive.occupied_cells()) {
        LevelDocument doc = make_document(elite->tree, goals, config.rng_seed);
        write_file((fs::path(out_dir) / cell_file_name(b)).string(), serialize(doc));
    }
    write_file((fs::path(out_dir) / "manifest.json").string(),
               make_manifest(result, goals, config.rng_seed).dump(2) + "\n");
    std::cout << preset_label(goals) << ": " << result.archive.occupied_count() << "/25 cells after "
              << result.generations << " generations (" << std::fixed << std::setprecision(1)
              << result.elapsed_seconds << " s)\n";
    print_occupancy(result.archive);
    return 0;
}

int cmd_render(const std::string& path, const std::string& format, const std::string& out) {
    const LevelDocument doc = load_document(path);
    const std::string body = format == "svg" ? render_svg(doc.grid) : render_text(doc.grid);
    if (out.empty() || out == "-")
        std::cout << body;
    else
        write_file(out, body);
    return 0;
}

int cmd_validate(const std::string& path) {
    const LevelDocument doc = load_document(path);
    const auto violations = check_document(doc);
    if (violations.empty()) {
        std::cout << path << ": ok\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << path << ": " << v << '\n';
    return 1;
}

int cmd_experiment(std::vector<std::string> presets, bool reference_sets, int runs, const RunFlags& rf,
                   const std::string& out_dir, unsigned threads) {
    if (reference_sets) presets.insert(presets.end(), reference_presets().begin(), reference_presets().end());
    if (presets.empty()) presets.push_back("20-4-4-30-2");
    std::vector<GenerationGoals> sets;
    for (const auto& p : presets) sets.push_back(parse_preset(p));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        std::cerr << "error: cannot create output directory " << out_dir << '\n';
        return 1;
    }
    const auto results = run_sweep(sets, runs, rf.resolve(), rf.seed, threads);
    std::string summary;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const std::string label = preset_label(sets[s]);
        const ExperimentReport rep = aggregate(label, results[s]);
        const fs::path base = fs::path(out_dir) / label;
        write_file(base.string() + "_cells.csv", cells_csv(rep));
        write_file(base.string() + "_occupancy.csv", occupancy_csv(rep));
        write_file(base.string() + "_convergence.csv", convergence_csv(rep));
        write_file(base.string() + "_report.json", report_json(rep, results[s]).dump(2) + "\n");
        summary += summary_table(rep) + "\n";
        for (const auto& r : results[s])
            if (r.failed) std::cerr << label << " run " << r.run_index << " failed: " << r.error << '\n';
    }
    write_file((fs::path(out_dir) / "summary.md").string(), summary);
    std::cout << summary;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quality-diversity dungeon generator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "evolve one archive and write a level file per elite");
    GoalFlags gen_goals;
    RunFlags gen_run;
    std::string gen_out = "levels";
    gen_goals.attach(*gen);
    gen_run.attach(*gen);
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();

    auto* render = app.add_subcommand("render", "draw a level file as text or SVG");
    std::string render_path, render_format = "text", render_out;
    render->add_option("level", render_path, "level JSON file")->required();
    render->add_option("--format", render_format, "text or svg")
        ->check(CLI::IsMember({"text", "svg"}))
        ->capture_default_str();
    render->add_option("--out", render_out, "output file (stdout when omitted)");

    auto* val = app.add_subcommand("validate", "re-check every invariant of a level file");
    std::string val_path;
    val->add_option("level", val_path, "level JSON file")->required();

    auto* exp = app.add_subcommand("experiment", "repeated runs with per-cell and convergence aggregates");
    std::vector<std::string> exp_presets;
    bool exp_reference = false;
    int exp_runs = 30;
    unsigned exp_threads = 0;
    RunFlags exp_run;
    std::string exp_out = "experiment";
    exp->add_option("--preset", exp_presets, "parameter set(s), repeatable");
    exp->add_flag("--reference-sets", exp_reference, "add the six reference parameter sets");
    exp->add_option("--runs", exp_runs, "runs per parameter set")->capture_default_str()->check(CLI::PositiveNumber);
    exp->add_option("--threads", exp_threads, "worker threads (DUNGEON_ELITES_THREADS caps this)");
    exp_run.attach(*exp);
    exp->add_option("--out", exp_out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_generate(gen_goals, gen_run, gen_out);
        if (*render) return cmd_render(render_path, render_format, render_out);
        if (*val) return cmd_validate(val_path);
        if (*exp) return cmd_experiment(exp_presets, exp_reference, exp_runs, exp_run, exp_out, exp_threads);
    } catch (const DocumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
