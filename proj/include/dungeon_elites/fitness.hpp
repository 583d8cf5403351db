#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "analysis.hpp"
#include "decoder.hpp"
#include "model.hpp"

namespace dungeon_elites {

struct GenerationGoals {
    int rooms = 20;
    int keys = 4;
    int locks = 4;
    int enemies = 30;
    double linear_coefficient = 2.0;

    friend bool operator==(const GenerationGoals&, const GenerationGoals&) = default;
};

inline double leniency(const LevelGrid& grid) {
    int safe = 0;
    for (const auto& [pos, room] : grid.rooms) safe += room.enemies == 0;
    return static_cast<double>(safe) / static_cast<double>(grid.room_count());
}

// Mean normalised coverage over the reference pairs. Summed as integers and
// divided once so that values landing on a bin edge stay exact.
inline double exploration(const LevelGrid& grid) {
    const auto pairs = reference_pairs(grid);
    long covered = 0;
    for (const auto& p : pairs) covered += flood_fill_coverage(grid, p.source, p.target);
    return static_cast<double>(covered) / static_cast<double>(pairs.size() * grid.room_count());
}

inline double f_goal(const LevelGrid& grid, const GenerationGoals& goals) {
    const int rooms = static_cast<int>(grid.room_count());
    const int keys = count_key_rooms(grid);
    const int locks = count_locked_rooms(grid);
    return std::abs(goals.rooms - rooms) + std::abs(goals.keys - keys) + std::abs(goals.locks - locks) +
           std::abs(goals.linear_coefficient - linear_coefficient(grid)) + (rooms - needed_rooms(grid)) +
           (locks - needed_locks(grid));
}

// Enemy sparsity: mean squared distance of enemies from their centroid. Each
// enemy sits at its room's position, scaled into the unit square spanned by
// the level's room bounding box, so the value lies in [0, 0.5].
inline double f_es(const LevelGrid& grid) {
    if (grid.rooms.empty()) return 0.0;
    int min_x = grid.rooms.begin()->first.x, max_x = min_x;
    int min_y = grid.rooms.begin()->first.y, max_y = min_y;
    for (const auto& [pos, room] : grid.rooms) {
        min_x = std::min(min_x, pos.x), max_x = std::max(max_x, pos.x);
        min_y = std::min(min_y, pos.y), max_y = std::max(max_y, pos.y);
    }
    auto unit = [](int v, int lo, int hi) { return hi == lo ? 0.0 : static_cast<double>(v - lo) / (hi - lo); };

    double n = 0, sx = 0, sy = 0;
    for (const auto& [pos, room] : grid.rooms) {
        n += room.enemies;
        sx += room.enemies * unit(pos.x, min_x, max_x);
        sy += room.enemies * unit(pos.y, min_y, max_y);
    }
    if (n == 0) return 0.0;
    const double mx = sx / n, my = sy / n;
    double acc = 0;
    for (const auto& [pos, room] : grid.rooms) {
        const double dx = unit(pos.x, min_x, max_x) - mx, dy = unit(pos.y, min_y, max_y) - my;
        acc += room.enemies * (dx * dx + dy * dy);
    }
    return acc / n;
}

// Standard deviation of per-room enemy counts, start and goal excluded.
inline double f_std(const LevelGrid& grid) {
    if (grid.room_count() <= 2) return 0.0;
    const double n = static_cast<double>(grid.room_count()) - 2.0;
    auto eligible = [&grid](GridCoord pos) { return pos != grid.start && (!grid.goal || pos != *grid.goal); };
    double sum = 0;
    for (const auto& [pos, room] : grid.rooms)
        if (eligible(pos)) sum += room.enemies;
    const double mean = sum / n;
    double acc = 0;
    for (const auto& [pos, room] : grid.rooms)
        if (eligible(pos)) acc += (room.enemies - mean) * (room.enemies - mean);
    return std::sqrt(acc / n);
}

struct Evaluation {
    FitnessBreakdown fitness;
    DescriptorPair descriptors;
};

inline Evaluation evaluate_grid(const LevelGrid& grid, const GenerationGoals& goals) {
    Evaluation e;
    e.fitness = FitnessBreakdown::combine(f_goal(grid, goals), f_es(grid), f_std(grid));
    e.descriptors = {leniency(grid), exploration(grid)};
    return e;
}

// Decodes, measures, and caches the result on the individual. The stored tree
// is replaced by its pruned form.
inline Evaluation evaluate(IndividualTree& tree, const GenerationGoals& goals) {
    auto decoded = decode(tree);
    resolve_goal(decoded.grid);
    const Evaluation e = evaluate_grid(decoded.grid, goals);
    const auto lineage = tree.lineage;
    tree = std::move(decoded.pruned);
    tree.lineage = lineage;
    tree.cached_fitness = e.fitness;
    tree.cached_descriptors = e.descriptors;
    return e;
}

inline constexpr int kBinsPerAxis = 5;

struct BinIndex {
    int leniency_bin = 0;     // 0 = L1 (most lenient) .. 4 = L5
    int exploration_bin = 0;  // 0 = E1 .. 4 = E5

    constexpr int flat() const { return leniency_bin * kBinsPerAxis + exploration_bin; }
    static constexpr BinIndex from_flat(int i) { return {i / kBinsPerAxis, i % kBinsPerAxis}; }

    std::string label() const {
        return "L" + std::to_string(leniency_bin + 1) + "-E" + std::to_string(exploration_bin + 1);
    }
    friend constexpr bool operator==(const BinIndex&, const BinIndex&) = default;
};

// All bins are [lo, hi) except the outer edges L1 (closed at 0.6) and E5
// (closed at 1.0). Anything else lands outside the map.
inline std::optional<BinIndex> bin(const DescriptorPair& d) {
    const double l = d.leniency;
    const double e = d.exploration;
    if (!(l >= 0.1 && l <= 0.6) || !(e >= 0.5 && e <= 1.0)) return std::nullopt;
    BinIndex b;
    if (l >= 0.5) b.leniency_bin = 0;
    else if (l >= 0.4) b.leniency_bin = 1;
    else if (l >= 0.3) b.leniency_bin = 2;
    else if (l >= 0.2) b.leniency_bin = 3;
    else b.leniency_bin = 4;
    if (e < 0.6) b.exploration_bin = 0;
    else if (e < 0.7) b.exploration_bin = 1;
    else if (e < 0.8) b.exploration_bin = 2;
    else if (e < 0.9) b.exploration_bin = 3;
    else b.exploration_bin = 4;
    return b;
}

// Midpoint descriptors of a cell.
inline DescriptorPair bin_center(BinIndex b) {
    return {0.55 - 0.1 * b.leniency_bin, 0.55 + 0.1 * b.exploration_bin};
}

}  // namespace dungeon_elites
