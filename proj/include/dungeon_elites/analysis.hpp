#pragma once

// Mission and layout measurements over a decoded level.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stack>
#include <utility>
#include <vector>

#include "decoder.hpp"
#include "errors.hpp"

namespace dungeon_elites {

struct MissionReach {
    std::set<GridCoord> rooms;
    std::set<int> keys;
};

// Rooms reachable from the start when every door whose key has been picked up
// opens. `sealed_lock` stays closed even if its key is held.
inline MissionReach reach_with_keys(const LevelGrid& grid, std::optional<int> sealed_lock = std::nullopt) {
    MissionReach reach;
    bool grew = true;
    while (grew) {
        grew = false;
        std::deque<GridCoord> queue{grid.start};
        std::set<GridCoord> seen{grid.start};
        while (!queue.empty()) {
            const GridCoord at = queue.front();
            queue.pop_front();
            const PlacedRoom& room = grid.room(at);
            if (room.room_type.is_key() && reach.keys.insert(room.room_type.id).second) grew = true;
            for (GridCoord next : room_neighbours(grid, at)) {
                if (seen.contains(next)) continue;
                const auto& lock = corridor_between(grid, at, next).lock_id;
                if (lock && (!reach.keys.contains(*lock) || lock == sealed_lock)) continue;
                seen.insert(next);
                queue.push_back(next);
            }
        }
        if (seen.size() != reach.rooms.size()) grew = true;
        reach.rooms = std::move(seen);
    }
    return reach;
}

inline bool is_solvable(const LevelGrid& grid) {
    if (!grid.goal) return false;
    return reach_with_keys(grid).rooms.contains(*grid.goal);
}

// Stronger than is_solvable: every room, and so every door, can be reached.
inline bool all_doors_openable(const LevelGrid& grid) { return reach_with_keys(grid).rooms.size() == grid.room_count(); }

struct ReferencePair {
    GridCoord source;
    GridCoord target;
    friend bool operator==(const ReferencePair&, const ReferencePair&) = default;
};

// (start, goal) first, then (key room, locked room) by shared id.
inline std::vector<ReferencePair> reference_pairs(const LevelGrid& grid) {
    std::vector<ReferencePair> out;
    if (!grid.goal) throw NoLockedRoom();
    out.push_back({grid.start, *grid.goal});
    std::map<int, GridCoord> keys;
    std::map<int, GridCoord> locks;
    for (const auto& [pos, room] : grid.rooms) {
        if (room.room_type.is_key()) keys[room.room_type.id] = pos;
        if (room.room_type.is_locked()) locks[room.room_type.id] = pos;
    }
    for (const auto& [id, key_pos] : keys) {
        auto it = locks.find(id);
        if (it == locks.end()) throw UnpairedKeyOrLock("key " + std::to_string(id) + " has no lock in the grid");
        out.push_back({key_pos, it->second});
    }
    if (keys.size() != locks.size()) throw UnpairedKeyOrLock("grid has a lock without a key");
    return out;
}

// Breadth-first wave over room adjacency (locks ignored, neighbours in N, E,
// S, W order). Returns how many rooms were dequeued up to and including the
// target.
inline int flood_fill_coverage(const LevelGrid& grid, GridCoord source, GridCoord target) {
    std::deque<GridCoord> queue{source};
    std::set<GridCoord> seen{source};
    int dequeued = 0;
    while (!queue.empty()) {
        const GridCoord at = queue.front();
        queue.pop_front();
        ++dequeued;
        if (at == target) return dequeued;
        for (GridCoord next : room_neighbours(grid, at))
            if (seen.insert(next).second) queue.push_back(next);
    }
    return dequeued;
}

// A* from start to goal over rooms with unit steps and a Manhattan heuristic.
// Locked doors are passable; returns the number of distinct locks on the path.
inline int needed_locks(const LevelGrid& grid) {
    if (!grid.goal) throw NoLockedRoom();
    const GridCoord goal = *grid.goal;
    auto h = [goal](GridCoord c) { return manhattan(c, goal) / 2; };

    using Entry = std::tuple<int, int, GridCoord>;  // f, g, cell
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::map<GridCoord, int> best_g{{grid.start, 0}};
    std::map<GridCoord, GridCoord> came_from;
    open.emplace(h(grid.start), 0, grid.start);
    while (!open.empty()) {
        auto [f, g, at] = open.top();
        open.pop();
        if (at == goal) break;
        if (g > best_g.at(at)) continue;
        for (GridCoord next : room_neighbours(grid, at)) {
            const int ng = g + 1;
            auto it = best_g.find(next);
            if (it != best_g.end() && it->second <= ng) continue;
            best_g[next] = ng;
            came_from[next] = at;
            open.emplace(ng + h(next), ng, next);
        }
    }
    if (!best_g.contains(goal)) return 0;
    std::set<int> locks;
    for (GridCoord at = goal; at != grid.start; at = came_from.at(at)) {
        const auto& lock = corridor_between(grid, came_from.at(at), at).lock_id;
        if (lock) locks.insert(*lock);
    }
    return static_cast<int>(locks.size());
}

// Depth-first player: walks the level in placement order, picks up keys, and
// sets aside doors it cannot open yet; those are retried once the matching key
// is held. Returns the number of distinct rooms visited when the goal is
// entered (or every reachable room if it never is).
inline int needed_rooms(const LevelGrid& grid) {
    std::vector<GridCoord> stack{grid.start};
    std::set<GridCoord> visited;
    std::set<int> keys;
    std::vector<GridCoord> deferred;
    while (!stack.empty()) {
        const GridCoord at = stack.back();
        stack.pop_back();
        if (!visited.insert(at).second) continue;
        if (grid.goal && at == *grid.goal) break;
        const PlacedRoom& room = grid.room(at);
        if (room.room_type.is_key()) {
            keys.insert(room.room_type.id);
            std::erase_if(deferred, [&](GridCoord d) {
                if (grid.room(d).room_type.id != room.room_type.id) return false;
                stack.push_back(d);
                return true;
            });
        }
        for (auto it = room.children.rbegin(); it != room.children.rend(); ++it) {
            const auto& lock = corridor_between(grid, at, *it).lock_id;
            if (lock && !keys.contains(*lock))
                deferred.push_back(*it);
            else
                stack.push_back(*it);
        }
    }
    return static_cast<int>(visited.size());
}

// Mean number of children over rooms that have at least one.
inline double linear_coefficient(const LevelGrid& grid) {
    if (grid.room_count() < 2) throw DegenerateLevel("linear coefficient needs at least two rooms");
    int branching = 0;
    int children = 0;
    for (const auto& [pos, room] : grid.rooms) {
        if (room.children.empty()) continue;
        ++branching;
        children += static_cast<int>(room.children.size());
    }
    return static_cast<double>(children) / branching;
}

inline int count_key_rooms(const LevelGrid& grid) {
    int n = 0;
    for (const auto& [pos, room] : grid.rooms) n += room.room_type.is_key();
    return n;
}

inline int count_locked_rooms(const LevelGrid& grid) {
    int n = 0;
    for (const auto& [pos, room] : grid.rooms) n += room.room_type.is_locked();
    return n;
}

inline int count_enemies(const LevelGrid& grid) {
    int n = 0;
    for (const auto& [pos, room] : grid.rooms) n += room.enemies;
    return n;
}

}  // namespace dungeon_elites
