#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fixtures.hpp"

using namespace dungeon_elites;

namespace {

std::set<GridCoord> room_cells(const LevelGrid& g) {
    std::set<GridCoord> out;
    for (const auto& [c, r] : g.rooms) out.insert(c);
    return out;
}

std::set<GridCoord> corridor_cells(const LevelGrid& g) {
    std::set<GridCoord> out;
    for (const auto& [c, r] : g.corridors) out.insert(c);
    return out;
}

// Re-walks the genotype with nothing but the placement rule and counts how
// often each cell would be claimed.
void claim(const RoomNode& n, GridCoord pos, Heading h, std::map<GridCoord, int>& counts) {
    ++counts[pos];
    for (const auto& c : n.children) {
        const Placement p = child_placement(pos, h, *c.direction);
        ++counts[p.corridor];
        claim(c, p.room, p.heading, counts);
    }
}

}  // namespace

TEST(Placement, RotatesRelativeToParent) {
    EXPECT_EQ(child_placement({0, 0}, Heading::South, Direction::Down), (Placement{{0, 1}, {0, 2}, Heading::South}));
    EXPECT_EQ(child_placement({0, 0}, Heading::South, Direction::Right), (Placement{{-1, 0}, {-2, 0}, Heading::West}));
    EXPECT_EQ(child_placement({-2, 0}, Heading::West, Direction::Right),
              (Placement{{-2, -1}, {-2, -2}, Heading::North}));
    EXPECT_EQ(child_placement({0, 0}, Heading::South, Direction::Left), (Placement{{1, 0}, {2, 0}, Heading::East}));
}

TEST(Decode, ReferenceRooms) {
    const auto grid = decode(fixtures::reference_tree()).grid;
    const std::set<GridCoord> expected{{0, 0},  {-2, 0}, {0, 2},  {2, 0},  {-2, -2}, {-4, 0},
                                       {-2, 2}, {2, 2},  {0, 4},  {-2, 4}, {-2, 6}};
    EXPECT_EQ(room_cells(grid), expected);
}

TEST(Decode, ReferenceCorridors) {
    const auto grid = decode(fixtures::reference_tree()).grid;
    const std::set<GridCoord> expected{{0, 1},  {0, 3},  {-1, 4}, {-2, 5}, {1, 0},
                                       {2, 1}, {-1, 0}, {-3, 0}, {-2, 1}, {-2, -1}};
    EXPECT_EQ(corridor_cells(grid), expected);
    EXPECT_EQ(grid.corridors.at({1, 0}).lock_id, 1);
    EXPECT_EQ(grid.corridors.at({-2, 5}).lock_id, 2);
    int locked = 0;
    for (const auto& [c, k] : grid.corridors) locked += k.lock_id.has_value();
    EXPECT_EQ(locked, 2);
}

TEST(Decode, ReferenceKeysAndDepths) {
    const auto grid = decode(fixtures::reference_tree()).grid;
    EXPECT_EQ(grid.room({-2, -2}).room_type, RoomType::key(1));
    EXPECT_EQ(grid.room({2, 2}).room_type, RoomType::key(2));
    EXPECT_EQ(grid.room({-2, 6}).depth, 4);
    EXPECT_EQ(grid.room({-2, 6}).parent, (GridCoord{-2, 4}));
    EXPECT_EQ(grid.placement_order.front(), (GridCoord{0, 0}));
    EXPECT_EQ(grid.placement_order.size(), 11u);
}

TEST(Decode, SingleRoot) {
    const auto r = decode(IndividualTree{});
    EXPECT_EQ(r.grid.room_count(), 1u);
    EXPECT_TRUE(r.grid.corridors.empty());
    EXPECT_EQ(r.grid.start, (GridCoord{0, 0}));
}

TEST(Decode, PrunesLaterCollidingBranch) {
    // Right then Left lands on (-2,2); so does Down then Right.
    auto tree = parse_tree("S[R[L],D[R[D]]]");
    tree.cached_fitness = FitnessBreakdown{};
    std::map<GridCoord, int> raw;
    claim(tree.root, {0, 0}, kRootHeading, raw);
    EXPECT_TRUE(std::any_of(raw.begin(), raw.end(), [](const auto& kv) { return kv.second > 1; }));

    const auto r = decode(tree);
    EXPECT_EQ(to_string(r.pruned), "S[R[L],D]");
    EXPECT_FALSE(r.pruned.cached_fitness.has_value());
    std::map<GridCoord, int> after;
    claim(r.pruned.root, {0, 0}, kRootHeading, after);
    for (const auto& [c, n] : after) EXPECT_EQ(n, 1) << c.x << "," << c.y;
    EXPECT_EQ(r.grid.room_count() + r.grid.corridors.size(), after.size());
}

TEST(Decode, KeepsCacheWhenNothingPruned) {
    auto tree = fixtures::reference_tree();
    tree.cached_fitness = FitnessBreakdown{};
    EXPECT_TRUE(decode(tree).pruned.cached_fitness.has_value());
}

TEST(Decode, IdempotentOnPrunedTree) {
    const auto first = decode(parse_tree("S[R[L[L[L]]],D[R[D,L]],L[D[R[R[R]]]]]"));
    const auto second = decode(first.pruned);
    EXPECT_TRUE(second.pruned.same_structure(first.pruned));
    EXPECT_EQ(second.grid, first.grid);
}

TEST(Decode, RoomAndCorridorParity) {
    const auto grid = decode(parse_tree("S[R[L[L[L]]],D[R[D,L]],L[D[R[R[R]]]]]")).grid;
    for (const auto& [c, r] : grid.rooms) EXPECT_TRUE(is_room_cell(c));
    for (const auto& [c, k] : grid.corridors) EXPECT_TRUE(is_corridor_cell(c));
}

TEST(Goal, DeepestLock) {
    auto grid = decode(fixtures::reference_tree()).grid;
    EXPECT_EQ(resolve_goal(grid), (GridCoord{-2, 6}));
    EXPECT_EQ(grid.goal, (GridCoord{-2, 6}));
}

TEST(Goal, SingleLock) {
    auto grid = decode(parse_tree("S[D+1,L#1]")).grid;
    EXPECT_EQ(resolve_goal(grid), (GridCoord{2, 0}));
}

TEST(Goal, TieGoesToLowestNodeId) {
    auto grid = decode(parse_tree("S[D+1[D+2],L#2,R#1]")).grid;
    // locks at depth 1: node 3 (L) and node 4 (R)
    EXPECT_EQ(resolve_goal(grid), (GridCoord{2, 0}));
}

TEST(Goal, ClearsEnemies) {
    auto grid = decode(parse_tree("S[D+1,L#1*4]")).grid;
    resolve_goal(grid);
    EXPECT_EQ(grid.room({2, 0}).enemies, 0);
}

TEST(Goal, NoLock) {
    auto grid = decode(parse_tree("S[D,L]")).grid;
    EXPECT_THROW(resolve_goal(grid), NoLockedRoom);
}
