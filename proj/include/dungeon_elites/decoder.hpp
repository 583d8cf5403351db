#pragma once

// Genotype -> phenotype. Rooms live on even coordinates, corridors on the
// cells between them. Every child is placed assuming its parent lies to the
// north of it, so Right/Left rotate the travel heading and Down keeps it.

#include <compare>
#include <cstdlib>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace dungeon_elites {

struct GridCoord {
    int x = 0;
    int y = 0;  // grows southward

    friend constexpr auto operator<=>(const GridCoord&, const GridCoord&) = default;
    friend constexpr GridCoord operator+(GridCoord a, GridCoord b) { return {a.x + b.x, a.y + b.y}; }
};

constexpr bool is_room_cell(GridCoord c) { return c.x % 2 == 0 && c.y % 2 == 0; }
constexpr bool is_corridor_cell(GridCoord c) { return (c.x % 2 == 0) != (c.y % 2 == 0); }
constexpr int manhattan(GridCoord a, GridCoord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
constexpr GridCoord midpoint(GridCoord a, GridCoord b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

enum class Heading : std::uint8_t { North, East, South, West };

constexpr GridCoord step(Heading h) {
    switch (h) {
        case Heading::North: return {0, -1};
        case Heading::East: return {1, 0};
        case Heading::South: return {0, 1};
        case Heading::West: return {-1, 0};
    }
    return {};
}

constexpr Heading turn(Heading h, Direction d) {
    const int v = static_cast<int>(h);
    switch (d) {
        case Direction::Right: return static_cast<Heading>((v + 1) % 4);
        case Direction::Left: return static_cast<Heading>((v + 3) % 4);
        case Direction::Down: return h;
    }
    return h;
}

inline constexpr Heading kRootHeading = Heading::South;

struct Placement {
    GridCoord corridor;
    GridCoord room;
    Heading heading;
    friend constexpr bool operator==(const Placement&, const Placement&) = default;
};

constexpr Placement child_placement(GridCoord parent, Heading parent_heading, Direction dir) {
    const Heading h = turn(parent_heading, dir);
    const GridCoord s = step(h);
    return {parent + s, parent + s + s, h};
}

struct PlacedRoom {
    int node_id = 0;
    RoomType room_type;
    int enemies = 0;
    int depth = 0;
    std::optional<GridCoord> parent;
    std::vector<GridCoord> children;  // placement order
    friend bool operator==(const PlacedRoom&, const PlacedRoom&) = default;
};

struct PlacedCorridor {
    std::optional<int> lock_id;
    friend bool operator==(const PlacedCorridor&, const PlacedCorridor&) = default;
};

struct LevelGrid {
    std::map<GridCoord, PlacedRoom> rooms;
    std::map<GridCoord, PlacedCorridor> corridors;
    std::vector<GridCoord> placement_order;  // depth-first pre-order
    GridCoord start{0, 0};
    std::optional<GridCoord> goal;

    std::size_t room_count() const { return rooms.size(); }
    const PlacedRoom& room(GridCoord c) const { return rooms.at(c); }

    friend bool operator==(const LevelGrid&, const LevelGrid&) = default;
};

// Rooms sharing a corridor with `c`, in N, E, S, W order.
inline std::vector<GridCoord> room_neighbours(const LevelGrid& grid, GridCoord c) {
    std::vector<GridCoord> out;
    for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
        const GridCoord s = step(h);
        if (grid.corridors.contains(c + s) && grid.rooms.contains(c + s + s)) out.push_back(c + s + s);
    }
    return out;
}

inline const PlacedCorridor& corridor_between(const LevelGrid& grid, GridCoord a, GridCoord b) {
    return grid.corridors.at(midpoint(a, b));
}

struct DecodeResult {
    LevelGrid grid;
    IndividualTree pruned;
};

namespace detail {

struct Decoder {
    LevelGrid& grid;
    bool pruned_any = false;

    bool occupied(GridCoord c) const { return grid.rooms.contains(c) || grid.corridors.contains(c); }

    void place(RoomNode& node, GridCoord pos, Heading heading, int depth, std::optional<GridCoord> parent) {
        grid.rooms[pos] = PlacedRoom{node.node_id, node.room_type, node.enemies, depth, parent, {}};
        grid.placement_order.push_back(pos);
        for (std::size_t i = 0; i < node.children.size();) {
            RoomNode& child = node.children[i];
            const Placement p = child_placement(pos, heading, *child.direction);
            if (occupied(p.room) || occupied(p.corridor)) {
                node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i));
                pruned_any = true;
                continue;
            }
            PlacedCorridor corridor;
            if (child.room_type.is_locked()) corridor.lock_id = child.room_type.id;
            grid.corridors[p.corridor] = corridor;
            grid.rooms[pos].children.push_back(p.room);
            place(child, p.room, p.heading, depth + 1, pos);
            ++i;
        }
    }
};

}  // namespace detail

// Places the tree depth-first; a child whose cells are taken is pruned with
// its whole subtree (first placed wins). The goal is left unresolved.
inline DecodeResult decode(IndividualTree tree) {
    DecodeResult out;
    detail::Decoder dec{out.grid};
    dec.place(tree.root, {0, 0}, kRootHeading, 0, std::nullopt);
    out.grid.start = {0, 0};
    if (dec.pruned_any) tree.invalidate();
    out.pruned = std::move(tree);
    return out;
}

// Deepest locked room, lowest node id on ties. Clears its enemies in the grid.
inline GridCoord resolve_goal(LevelGrid& grid) {
    std::optional<GridCoord> best;
    for (const auto& [pos, room] : grid.rooms) {
        if (!room.room_type.is_locked()) continue;
        if (!best) {
            best = pos;
            continue;
        }
        const PlacedRoom& b = grid.rooms.at(*best);
        if (std::tie(b.depth, room.node_id) < std::tie(room.depth, b.node_id)) best = pos;
    }
    if (!best) throw NoLockedRoom();
    grid.goal = best;
    grid.rooms.at(*best).enemies = 0;
    return *best;
}

inline LevelGrid decode_with_goal(const IndividualTree& tree) {
    LevelGrid grid = decode(tree).grid;
    resolve_goal(grid);
    return grid;
}

}  // namespace dungeon_elites
