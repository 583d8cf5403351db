#include <gtest/gtest.h>

#include <cstdlib>

#include "fixtures.hpp"

using namespace dungeon_elites;

namespace {

RunArtifact artifact(int index, std::vector<std::pair<int, double>> cells, std::vector<double> best) {
    RunArtifact a;
    a.run_index = index;
    for (auto [i, v] : cells) a.cells[static_cast<std::size_t>(i)] = v;
    for (std::size_t g = 0; g < best.size(); ++g) {
        GenerationRecord r;
        r.generation = static_cast<int>(g);
        r.best = best[g];
        r.mean = best[g] + 1;
        r.worst = best[g] + 2;
        a.log.push_back(r);
    }
    a.generations = static_cast<int>(best.size()) - 1;
    return a;
}

}  // namespace

TEST(Preset, Parse) {
    EXPECT_EQ(parse_preset("20-4-4-30-2"), (GenerationGoals{20, 4, 4, 30, 2.0}));
    EXPECT_EQ(parse_preset("30-6-6-50-1.5"), (GenerationGoals{30, 6, 6, 50, 1.5}));
    EXPECT_THROW(parse_preset("20-4-4-30"), DungeonError);
    EXPECT_THROW(parse_preset("20-4-x-30-2"), DungeonError);
    EXPECT_THROW(parse_preset("20-4-4-30-2z"), DungeonError);
    EXPECT_THROW(parse_preset("0-4-4-30-2"), DungeonError);
}

TEST(Preset, LabelRoundTrip) {
    for (const auto& p : reference_presets()) EXPECT_EQ(preset_label(parse_preset(p)), p);
    EXPECT_EQ(reference_presets().size(), 6u);
}

TEST(Aggregate, OnlyOccupiedRunsCount) {
    const std::vector<RunArtifact> runs{artifact(0, {{0, 1.0}, {1, 4.0}}, {3, 2}), artifact(1, {{0, 3.0}}, {5, 4, 1})};
    const auto rep = aggregate("x", runs);
    EXPECT_EQ(rep.runs, 2);
    EXPECT_EQ(rep.cells[0].occupied_runs, 2u);
    EXPECT_DOUBLE_EQ(rep.cells[0].mean, 2.0);
    EXPECT_DOUBLE_EQ(rep.cells[0].stddev, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(rep.cells[0].occupancy_rate, 1.0);
    EXPECT_EQ(rep.cells[1].occupied_runs, 1u);
    EXPECT_DOUBLE_EQ(rep.cells[1].mean, 4.0);
    EXPECT_DOUBLE_EQ(rep.cells[1].stddev, 0.0);
    EXPECT_DOUBLE_EQ(rep.cells[1].occupancy_rate, 0.5);
    EXPECT_EQ(rep.cells[2].occupied_runs, 0u);
}

TEST(Aggregate, ConvergenceWithStandardError) {
    const std::vector<RunArtifact> runs{artifact(0, {}, {3, 2}), artifact(1, {}, {5, 4, 1})};
    const auto rep = aggregate("x", runs);
    ASSERT_EQ(rep.convergence.size(), 2u);  // shortest log
    EXPECT_DOUBLE_EQ(rep.convergence[0].best, 4.0);
    EXPECT_DOUBLE_EQ(rep.convergence[0].best_se, std::sqrt(2.0) / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(rep.convergence[1].mean, 4.0);
    EXPECT_DOUBLE_EQ(rep.convergence[1].worst, 5.0);
}

TEST(Aggregate, FailedRunsRecorded) {
    auto bad = artifact(1, {{0, 100.0}}, {1});
    bad.failed = true;
    bad.error = "boom";
    const auto rep = aggregate("x", {artifact(0, {{0, 1.0}}, {1}), bad});
    EXPECT_EQ(rep.failed_runs, std::vector<int>{1});
    EXPECT_DOUBLE_EQ(rep.cells[0].mean, 1.0);
    EXPECT_DOUBLE_EQ(rep.cells[0].occupancy_rate, 0.5);
    EXPECT_EQ(rep.generations, (std::vector<int>{0, 0}));
}

TEST(Aggregate, SingleRunMatchesArchive) {
    EvolutionConfig c;
    c.max_generations = 3;
    c.time_budget.reset();
    c.rng_seed = 21;
    const GenerationGoals g{15, 3, 2, 20, 2};
    const auto art = execute_run(g, c, 0);
    const auto direct = run(g, c);
    const auto rep = aggregate(preset_label(g), {art});
    const auto totals = direct.archive.cell_totals();
    for (int i = 0; i < ElitesArchive::kCells; ++i) {
        const auto& cell = rep.cells[static_cast<std::size_t>(i)];
        EXPECT_EQ(cell.occupied_runs, totals[static_cast<std::size_t>(i)] ? 1u : 0u);
        if (const auto& t = totals[static_cast<std::size_t>(i)]) {
            EXPECT_DOUBLE_EQ(cell.mean, *t);
        }
    }
    EXPECT_EQ(rep.convergence.size(), direct.log.size());
}

TEST(RowMean, SkipsEmptyCells) {
    const auto rep = aggregate("x", {artifact(0, {{0, 1.0}, {4, 3.0}, {10, 7.0}}, {1})});
    EXPECT_DOUBLE_EQ(*row_mean(rep, 0), 2.0);
    EXPECT_FALSE(row_mean(rep, 1));
    EXPECT_DOUBLE_EQ(*row_mean(rep, 2), 7.0);
}

TEST(Tables, CsvLayout) {
    const auto rep = aggregate("x", {artifact(0, {{0, 1.0}}, {1}), artifact(1, {{0, 2.0}}, {1})});
    const auto csv = cells_csv(rep);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "leniency,E1,E2,E3,E4,E5");
    EXPECT_NE(csv.find("L1,1.50\xC2\xB1" "0.71,-,-,-,-\n"), std::string::npos);
    EXPECT_NE(csv.find("L5,-,-,-,-,-\n"), std::string::npos);
    EXPECT_NE(occupancy_csv(rep).find("L1,1.000,0.000"), std::string::npos);
    EXPECT_EQ(convergence_csv(rep).substr(0, 46), "generation,best,best_se,mean,mean_se,worst,wor");
    EXPECT_NE(summary_table(rep).find("| L1 | 1.50 ± 0.71 |"), std::string::npos);
}

TEST(Sweep, SameMasterSeedSameReport) {
    EvolutionConfig c;
    c.max_generations = 2;
    c.time_budget.reset();
    const std::vector<GenerationGoals> sets{parse_preset("15-3-2-20-2"), parse_preset("20-4-4-30-2")};
    const auto a = run_sweep(sets, 2, c, 1234, 2);
    const auto b = run_sweep(sets, 2, c, 1234, 1);
    for (std::size_t s = 0; s < sets.size(); ++s) {
        auto ja = report_json(aggregate("x", a[s]), a[s]);
        auto jb = report_json(aggregate("x", b[s]), b[s]);
        ja.erase("metadata");
        jb.erase("metadata");
        EXPECT_EQ(ja.dump(), jb.dump());
        EXPECT_EQ(cells_csv(aggregate("x", a[s])), cells_csv(aggregate("x", b[s])));
        EXPECT_EQ(a[s][1].seed, run_seed(1234, s, 1));
    }
    EXPECT_NE(a[0][0].seed, a[0][1].seed);
}

TEST(Sweep, FailuresDoNotAbort) {
    EvolutionConfig c;
    c.max_generations = 1;
    c.time_budget.reset();
    // a single room can never hold the goal lock
    const auto out = run_sweep({GenerationGoals{1, 0, 0, 0, 1}, parse_preset("15-3-2-20-2")}, 1, c, 7, 1);
    EXPECT_TRUE(out[0][0].failed);
    EXPECT_FALSE(out[0][0].error.empty());
    EXPECT_FALSE(out[1][0].failed);
}

TEST(Workers, EnvironmentCap) {
    setenv("DUNGEON_ELITES_THREADS", "1", 1);
    EXPECT_EQ(worker_count(8), 1u);
    unsetenv("DUNGEON_ELITES_THREADS");
    EXPECT_EQ(worker_count(3), 3u);
}
