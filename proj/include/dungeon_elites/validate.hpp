#pragma once

// Invariant checks shared by the `validate` command and the test suites.
// Each function returns human-readable violations; empty means valid.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "decoder.hpp"
#include "fitness.hpp"
#include "level_io.hpp"
#include "model.hpp"

namespace dungeon_elites {

namespace detail {

inline std::string cell_name(GridCoord c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace detail

inline std::vector<std::string> check_grid(const LevelGrid& grid, const GenerationGoals& goals) {
    using detail::cell_name;
    std::vector<std::string> v;

    if (grid.start != GridCoord{0, 0}) v.push_back("start is not at (0,0)");
    if (!grid.rooms.contains(grid.start)) v.push_back("start cell holds no room");
    for (const auto& [c, r] : grid.rooms)
        if (!is_room_cell(c)) v.push_back("room at " + cell_name(c) + " is not on even coordinates");
    for (const auto& [c, r] : grid.corridors) {
        if (!is_corridor_cell(c)) v.push_back("corridor at " + cell_name(c) + " has the wrong parity");
        if (grid.rooms.contains(c)) v.push_back("corridor and room overlap at " + cell_name(c));
    }

    // Tree shape: one corridor per parent link and nothing else.
    std::size_t links = 0;
    for (const auto& [c, r] : grid.rooms) {
        if (!r.parent) {
            if (c != grid.start) v.push_back("room " + cell_name(c) + " has no parent");
            continue;
        }
        ++links;
        if (manhattan(c, *r.parent) != 2 || !grid.rooms.contains(*r.parent)) {
            v.push_back("room " + cell_name(c) + " is not adjacent to its parent");
            continue;
        }
        auto it = grid.corridors.find(midpoint(c, *r.parent));
        if (it == grid.corridors.end()) {
            v.push_back("no corridor between " + cell_name(c) + " and its parent");
            continue;
        }
        const std::optional<int> expected =
            r.room_type.is_locked() ? std::optional<int>(r.room_type.id) : std::nullopt;
        if (it->second.lock_id != expected) v.push_back("corridor into " + cell_name(c) + " has the wrong lock");
    }
    if (links != grid.corridors.size()) v.push_back("corridor count does not match the room tree");

    std::map<int, int> keys, locks;
    for (const auto& [c, r] : grid.rooms) {
        if (r.room_type.is_key()) ++keys[r.room_type.id];
        if (r.room_type.is_locked()) ++locks[r.room_type.id];
    }
    for (const auto& [id, n] : keys)
        if (n != 1 || locks[id] != 1) v.push_back("key " + std::to_string(id) + " is not paired with exactly one lock");
    for (const auto& [id, n] : locks)
        if (!keys.contains(id)) v.push_back("lock " + std::to_string(id) + " has no key");

    if (!grid.goal) {
        v.push_back("no goal room");
    } else {
        LevelGrid fresh = grid;
        try {
            if (resolve_goal(fresh) != *grid.goal) v.push_back("goal is not the deepest locked room");
        } catch (const NoLockedRoom&) {
            v.push_back("goal set but the level has no locked room");
        }
        if (*grid.goal == grid.start) v.push_back("goal coincides with start");
        if (auto it = grid.rooms.find(*grid.goal); it != grid.rooms.end() && it->second.enemies != 0)
            v.push_back("goal room holds enemies");
        if (!is_solvable(grid)) v.push_back("goal cannot be reached");
    }
    if (auto it = grid.rooms.find(grid.start); it != grid.rooms.end() && it->second.enemies != 0)
        v.push_back("start room holds enemies");
    if (count_enemies(grid) != goals.enemies)
        v.push_back("level holds " + std::to_string(count_enemies(grid)) + " enemies, goal is " +
                    std::to_string(goals.enemies));
    return v;
}

// For individuals about to enter the archive.
inline std::vector<std::string> check_individual(const IndividualTree& tree, const GenerationGoals& goals) {
    std::vector<std::string> v;
    auto decoded = decode(tree);
    if (!same_rooms(decoded.pruned, tree)) v.push_back("tree still has overlapping branches");
    if (!pairing_valid(tree)) v.push_back("lock/key pairing broken in the tree");
    try {
        resolve_goal(decoded.grid);
    } catch (const NoLockedRoom&) {
        v.push_back("no locked room");
        return v;
    }
    if (total_enemies(tree) != count_enemies(decoded.grid)) v.push_back("goal room held enemies in the tree");
    for (auto& s : check_grid(decoded.grid, goals)) v.push_back(std::move(s));
    return v;
}

inline std::vector<std::string> check_document(const LevelDocument& doc) {
    std::vector<std::string> v = doc.read_issues;
    for (auto& s : check_grid(doc.grid, doc.goals)) v.push_back(std::move(s));
    if (!v.empty()) return v;
    const Evaluation e = evaluate_grid(doc.grid, doc.goals);
    auto compare = [&](const char* name, double stored, double fresh) {
        if (!detail::close(stored, fresh))
            v.push_back(std::string("stored ") + name + " " + std::to_string(stored) + " differs from recomputed " +
                        std::to_string(fresh));
    };
    compare("leniency", doc.descriptors.leniency, e.descriptors.leniency);
    compare("exploration", doc.descriptors.exploration, e.descriptors.exploration);
    compare("f_goal", doc.fitness.f_goal, e.fitness.f_goal);
    compare("f_es", doc.fitness.f_es, e.fitness.f_es);
    compare("f_std", doc.fitness.f_std, e.fitness.f_std);
    compare("total", doc.fitness.total, e.fitness.total);
    return v;
}

}  // namespace dungeon_elites
