#pragma once

// Initialization, variation, repair, and the MAP-Elites loop.

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "archive.hpp"
#include "decoder.hpp"
#include "errors.hpp"
#include "fitness.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace dungeon_elites {

struct EvolutionConfig {
    int initial_population = 25;
    int intermediate_population = 100;
    double mutation_rate = 0.15;
    double add_remove_split = 0.5;
    int tournament_size = 2;
    std::optional<std::chrono::duration<double>> time_budget = std::chrono::duration<double>(60.0);
    std::optional<int> max_generations;
    std::uint64_t rng_seed = 0;
    int init_attempt_cap = 1000;
};

inline void validate(const GenerationGoals& g) {
    if (g.rooms < 1) throw DungeonError("goals: rooms must be positive");
    if (g.keys < 0 || g.locks < 0 || g.enemies < 0) throw DungeonError("goals: counts must be non-negative");
    if (!(g.linear_coefficient >= 1.0)) throw DungeonError("goals: linear coefficient must be at least 1");
}

inline void validate(const EvolutionConfig& c) {
    if (c.initial_population < 1 || c.intermediate_population < 1)
        throw DungeonError("config: population sizes must be positive");
    if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) throw DungeonError("config: mutation rate not in [0, 1]");
    if (c.tournament_size != 2) throw DungeonError("config: only binary tournaments are supported");
    if (!c.time_budget && !c.max_generations) throw DungeonError("config: no termination criterion");
    if (c.max_generations && *c.max_generations < 0) throw DungeonError("config: negative generation count");
    if (c.init_attempt_cap < 1) throw DungeonError("config: init attempt cap must be positive");
}

namespace detail {

inline std::vector<int> normal_non_root_bfs(const IndividualTree& tree) {
    std::vector<int> out;
    for (const RoomNode* n : traverse_breadth_first(tree))
        if (n != &tree.root && n->room_type.is_normal()) out.push_back(n->node_id);
    return out;
}

inline std::vector<int> non_root_ids(const IndividualTree& tree) {
    auto ids = breadth_first_ids(tree);
    ids.erase(ids.begin());
    return ids;
}

inline void set_type(IndividualTree& tree, int node_id, RoomType type) {
    node_at(tree, node_id).room_type = type;
    if (type.id >= tree.next_shared_id) tree.next_shared_id = type.id + 1;
    tree.invalidate();
}

// Ancestors of `node_id` (root included, node excluded).
inline std::set<int> path_to(const IndividualTree& tree, int node_id) {
    std::set<int> out;
    for (const RoomNode* p = find_parent(tree, node_id); p; p = find_parent(tree, p->node_id)) out.insert(p->node_id);
    return out;
}

}  // namespace detail

// Converts a Normal room to Key and a breadth-first-later Normal room to
// Locked under a fresh shared id. The key can then never sit behind its own
// lock. Returns false when fewer than two Normal non-root rooms exist.
inline bool add_lock_key_pair(IndividualTree& tree, Rng& rng) {
    const auto order = detail::normal_non_root_bfs(tree);
    if (order.size() < 2) return false;
    const std::size_t key_at = rng.index(order.size() - 1);
    const std::size_t lock_at = key_at + 1 + rng.index(order.size() - key_at - 1);
    const int id = tree.fresh_shared_id();
    detail::set_type(tree, order[key_at], RoomType::key(id));
    detail::set_type(tree, order[lock_at], RoomType::locked(id));
    return true;
}

// Reverts a random key room and its lock to Normal.
inline bool remove_lock_key_pair(IndividualTree& tree, Rng& rng) {
    std::vector<const RoomNode*> keys;
    for (const RoomNode* n : traverse_breadth_first(tree))
        if (n->room_type.is_key()) keys.push_back(n);
    if (keys.empty()) return false;
    const int id = keys[rng.index(keys.size())]->room_type.id;
    for_each_room(tree, [id](RoomNode& r) {
        if (!r.room_type.is_normal() && r.room_type.id == id) r.room_type = RoomType::normal();
    });
    tree.invalidate();
    return true;
}

// Guarantees a locked room so the goal can be resolved. A stray key is dropped
// first if the level has keys but no locks.
inline IndividualTree ensure_lock_exists(IndividualTree tree, Rng& rng) {
    bool has_lock = false;
    std::vector<int> keys;
    for (const RoomNode* n : traverse_breadth_first(tree)) {
        has_lock |= n->room_type.is_locked();
        if (n->room_type.is_key()) keys.push_back(n->node_id);
    }
    if (has_lock) return tree;
    if (node_count(tree) < 2) throw NoEligibleRoom("a single room cannot host a lock");
    if (!keys.empty()) detail::set_type(tree, keys[rng.index(keys.size())], RoomType::normal());
    if (add_lock_key_pair(tree, rng)) return tree;
    // Only one Normal non-root room is left: the start room carries the key.
    const auto order = detail::normal_non_root_bfs(tree);
    if (order.empty() || !tree.root.room_type.is_normal())
        throw NoEligibleRoom("no Normal room left to host a lock");
    const int id = tree.fresh_shared_id();
    detail::set_type(tree, tree.root.node_id, RoomType::key(id));
    detail::set_type(tree, order[rng.index(order.size())], RoomType::locked(id));
    return tree;
}

// Restores the lock/key bijection on a (pruned) tree and makes every door
// openable. Orphan keys get a new lock off their own start path, orphan locks
// get a key among rooms reachable without them; when no host exists the orphan
// becomes Normal. Keys stuck behind closed doors are moved to reachable rooms.
inline IndividualTree repair_lock_keys(IndividualTree tree, Rng& rng) {
    tree = decode(std::move(tree)).pruned;

    // Duplicated ids keep their breadth-first-earliest holder.
    std::map<int, std::vector<int>> keys, locks;
    for (const RoomNode* n : traverse_breadth_first(tree)) {
        if (n->room_type.is_key()) keys[n->room_type.id].push_back(n->node_id);
        if (n->room_type.is_locked()) locks[n->room_type.id].push_back(n->node_id);
    }
    for (auto* group : {&keys, &locks})
        for (auto& [id, holders] : *group)
            for (std::size_t i = 1; i < holders.size(); ++i) detail::set_type(tree, holders[i], RoomType::normal());

    for (const auto& [id, holders] : keys) {
        if (locks.contains(id)) continue;
        const int key_node = holders.front();
        const auto on_path = detail::path_to(tree, key_node);
        std::vector<int> hosts;
        for (int n : detail::normal_non_root_bfs(tree))
            if (!on_path.contains(n)) hosts.push_back(n);
        if (hosts.empty())
            detail::set_type(tree, key_node, RoomType::normal());
        else
            detail::set_type(tree, hosts[rng.index(hosts.size())], RoomType::locked(id));
    }

    for (const auto& [id, holders] : locks) {
        if (keys.contains(id)) continue;
        const LevelGrid grid = decode(tree).grid;
        const auto reach = reach_with_keys(grid, id);
        std::vector<int> hosts;
        for (GridCoord c : grid.placement_order) {
            const PlacedRoom& r = grid.room(c);
            if (c != grid.start && r.room_type.is_normal() && reach.rooms.contains(c)) hosts.push_back(r.node_id);
        }
        if (hosts.empty())
            detail::set_type(tree, holders.front(), RoomType::normal());
        else
            detail::set_type(tree, hosts[rng.index(hosts.size())], RoomType::key(id));
    }

    // Unblock doors one at a time, lowest shared id first.
    while (true) {
        const LevelGrid grid = decode(tree).grid;
        const auto reach = reach_with_keys(grid);
        if (reach.rooms.size() == grid.room_count()) break;
        std::optional<int> blocked;
        for (const auto& [pos, room] : grid.rooms) {
            if (!room.room_type.is_locked() || reach.rooms.contains(pos)) continue;
            if (room.parent && reach.rooms.contains(*room.parent) && (!blocked || room.room_type.id < *blocked))
                blocked = room.room_type.id;
        }
        const int id = *blocked;  // some frontier lock must be closed
        int key_node = -1;
        for_each_room(tree, [&](const RoomNode& r) {
            if (r.room_type == RoomType::key(id)) key_node = r.node_id;
        });
        std::vector<int> hosts;
        for (GridCoord c : grid.placement_order) {
            const PlacedRoom& r = grid.room(c);
            if (c != grid.start && r.room_type.is_normal() && reach.rooms.contains(c)) hosts.push_back(r.node_id);
        }
        if (hosts.empty()) {
            for_each_room(tree, [id](RoomNode& r) {
                if (!r.room_type.is_normal() && r.room_type.id == id) r.room_type = RoomType::normal();
            });
            tree.invalidate();
        } else {
            if (key_node >= 0) detail::set_type(tree, key_node, RoomType::normal());
            detail::set_type(tree, hosts[rng.index(hosts.size())], RoomType::key(id));
        }
    }
    return tree;
}

// Moves enemies between two distinct random rooms. The total is conserved.
inline IndividualTree enemy_transfer(IndividualTree tree, Rng& rng) {
    const auto ids = breadth_first_ids(tree);
    if (ids.size() < 2) return tree;
    const std::size_t a = rng.index(ids.size());
    std::size_t b = rng.index(ids.size() - 1);
    if (b >= a) ++b;
    RoomNode* from = &node_at(tree, ids[a]);
    RoomNode* to = &node_at(tree, ids[b]);
    if (from->enemies == 0 && to->enemies == 0) return tree;
    if (from->enemies == 0) std::swap(from, to);
    const int k = rng.between(1, from->enemies);
    from->enemies -= k;
    to->enemies += k;
    tree.invalidate();
    return tree;
}

// Adds or removes one lock/key pair (50/50 by default; the other action when
// the chosen one is impossible), then transfers enemies.
inline IndividualTree mutate(IndividualTree tree, Rng& rng, double add_probability = 0.5) {
    if (rng.chance(add_probability)) {
        if (!add_lock_key_pair(tree, rng)) remove_lock_key_pair(tree, rng);
    } else {
        if (!remove_lock_key_pair(tree, rng)) add_lock_key_pair(tree, rng);
    }
    return enemy_transfer(std::move(tree), rng);
}

// Clears start and goal, then trims from the most crowded rooms or tops up the
// least crowded non-empty rooms until the total matches the goal count.
inline IndividualTree repair_enemies(IndividualTree tree, const GenerationGoals& goals, Rng& rng) {
    LevelGrid grid = decode(tree).grid;
    resolve_goal(grid);
    const int goal_id = grid.room(*grid.goal).node_id;
    const int start_id = tree.root.node_id;

    std::vector<RoomNode*> eligible;
    for_each_room(tree, [&](RoomNode& r) {
        if (r.node_id == start_id || r.node_id == goal_id) {
            r.enemies = 0;
        } else {
            eligible.push_back(&r);
        }
    });
    tree.invalidate();
    std::sort(eligible.begin(), eligible.end(), [](const RoomNode* x, const RoomNode* y) { return x->node_id < y->node_id; });
    if (eligible.empty()) {
        if (goals.enemies > 0) throw NoEligibleRoom("no room may hold enemies");
        return tree;
    }

    int total = 0;
    for (const RoomNode* r : eligible) total += r->enemies;
    while (total > goals.enemies) {
        // max_element keeps the first maximum, i.e. the lowest node id
        auto it = std::max_element(eligible.begin(), eligible.end(),
                                   [](const RoomNode* x, const RoomNode* y) { return x->enemies < y->enemies; });
        --(*it)->enemies;
        --total;
    }
    while (total < goals.enemies) {
        RoomNode* target = nullptr;
        for (RoomNode* r : eligible)
            if (r->enemies > 0 && (!target || r->enemies < target->enemies)) target = r;
        if (!target) target = eligible[rng.index(eligible.size())];
        ++target->enemies;
        ++total;
    }
    return tree;
}

namespace detail {

// Replaces the subtree at `cut` with a copy of `donor`. The donor takes the
// cut's direction slot and fresh node ids. A donor shared id is kept when the
// rest of the tree does not use it, or when it completes a key/lock pair
// there; otherwise it is renamed so unrelated pairs never merge.
inline void graft(IndividualTree& tree, int cut, RoomNode donor) {
    RoomNode& slot = node_at(tree, cut);
    const auto dir = slot.direction;
    slot.children.clear();
    slot.room_type = RoomType::normal();

    std::map<int, std::set<RoomKind>> outside, incoming;
    preorder(tree.root, [&](const RoomNode& r) {
        if (!r.room_type.is_normal()) outside[r.room_type.id].insert(r.room_type.kind);
    });
    preorder(donor, [&](const RoomNode& r) {
        if (!r.room_type.is_normal()) incoming[r.room_type.id].insert(r.room_type.kind);
    });
    std::map<int, int> remap;
    for (const auto& [id, kinds] : incoming) {
        auto it = outside.find(id);
        const bool completes = it != outside.end() && kinds.size() == 1 && it->second.size() == 1 &&
                               *kinds.begin() != *it->second.begin();
        remap[id] = (it == outside.end() || completes) ? id : tree.fresh_shared_id();
    }
    preorder(donor, [&](RoomNode& r) {
        r.node_id = tree.fresh_node_id();
        if (r.room_type.is_normal()) return;
        r.room_type.id = remap.at(r.room_type.id);
        if (r.room_type.id >= tree.next_shared_id) tree.next_shared_id = r.room_type.id + 1;
    });
    donor.direction = dir;
    slot = std::move(donor);
    tree.invalidate();
}

}  // namespace detail

// Subtree-swap crossover at one uniformly chosen non-root cut per parent.
// Offspring are decoded (pruning overlaps) and lock/key-repaired.
inline std::pair<IndividualTree, IndividualTree> crossover(const IndividualTree& parent_a,
                                                           const IndividualTree& parent_b, Rng& rng) {
    const auto cuts_a = detail::non_root_ids(parent_a);
    const auto cuts_b = detail::non_root_ids(parent_b);
    if (cuts_a.empty() || cuts_b.empty()) return {parent_a, parent_b};
    const int cut_a = cuts_a[rng.index(cuts_a.size())];
    const int cut_b = cuts_b[rng.index(cuts_b.size())];

    IndividualTree child_a = parent_a;
    IndividualTree child_b = parent_b;
    detail::graft(child_a, cut_a, *find_node(parent_b, cut_b));
    detail::graft(child_b, cut_b, *find_node(parent_a, cut_a));
    child_a = repair_lock_keys(decode(std::move(child_a)).pruned, rng);
    child_b = repair_lock_keys(decode(std::move(child_b)).pruned, rng);
    return {std::move(child_a), std::move(child_b)};
}

// Grows a tree to the requested size, places lock/key pairs so that every
// door can be opened, and scatters enemies outside the start and goal rooms.
inline IndividualTree random_individual(const GenerationGoals& goals, Rng& rng, int attempt_cap = 1000) {
    validate(goals);
    IndividualTree tree;

    struct Slot {
        GridCoord pos;
        Heading heading;
    };
    std::map<int, Slot> placed{{tree.root.node_id, {{0, 0}, kRootHeading}}};
    std::set<GridCoord> occupied{{0, 0}};
    int failures = 0;
    while (static_cast<int>(placed.size()) < goals.rooms && failures < attempt_cap) {
        std::vector<int> open;
        for (const auto& [id, slot] : placed)
            if (!find_node(tree, id)->free_directions().empty()) open.push_back(id);
        const int parent = open[rng.index(open.size())];
        const auto free = find_node(tree, parent)->free_directions();
        const Direction dir = free[rng.index(free.size())];
        const Placement p = child_placement(placed.at(parent).pos, placed.at(parent).heading, dir);
        if (occupied.contains(p.room) || occupied.contains(p.corridor)) {
            ++failures;
            continue;
        }
        const int child = attach_child(tree, parent, dir);
        occupied.insert(p.room);
        occupied.insert(p.corridor);
        placed[child] = {p.room, p.heading};
    }

    const int non_root = static_cast<int>(placed.size()) - 1;
    const int pairs = std::min({goals.keys, goals.locks, non_root / 2});
    if (pairs > 0) {
        auto candidates = detail::non_root_ids(tree);
        bool ok = false;
        for (int attempt = 0; attempt < attempt_cap && !ok; ++attempt) {
            for_each_room(tree, [](RoomNode& r) { r.room_type = RoomType::normal(); });
            // partial Fisher-Yates for 2 * pairs distinct rooms
            for (int i = 0; i < 2 * pairs; ++i) {
                const std::size_t j = static_cast<std::size_t>(i) + rng.index(candidates.size() - static_cast<std::size_t>(i));
                std::swap(candidates[static_cast<std::size_t>(i)], candidates[j]);
            }
            for (int i = 0; i < pairs; ++i) {
                node_at(tree, candidates[static_cast<std::size_t>(i)]).room_type = RoomType::key(i + 1);
                node_at(tree, candidates[static_cast<std::size_t>(pairs + i)]).room_type = RoomType::locked(i + 1);
            }
            LevelGrid grid = decode(tree).grid;
            resolve_goal(grid);
            ok = all_doors_openable(grid);
        }
        if (!ok) throw InitExhausted("no solvable lock/key assignment found");
        tree.next_shared_id = pairs + 1;
    }

    tree = ensure_lock_exists(std::move(tree), rng);

    LevelGrid grid = decode(tree).grid;
    resolve_goal(grid);
    const int goal_id = grid.room(*grid.goal).node_id;
    std::vector<int> eligible;
    for (int id : detail::non_root_ids(tree))
        if (id != goal_id) eligible.push_back(id);
    if (goals.enemies > 0 && eligible.empty()) throw NoEligibleRoom("no room may hold enemies");
    for (int e = 0; e < goals.enemies; ++e) ++node_at(tree, eligible[rng.index(eligible.size())]).enemies;
    tree.invalidate();
    return tree;
}

struct GenerationRecord {
    int generation = 0;
    std::size_t occupied = 0;
    double best = 0.0;
    double mean = 0.0;
    double worst = 0.0;
    std::array<std::optional<double>, ElitesArchive::kCells> cells;
};

using ConvergenceLog = std::vector<GenerationRecord>;

struct RunResult {
    ElitesArchive archive;
    ConvergenceLog log;
    int generations = 0;
    std::size_t init_attempts = 0;
    std::size_t discarded = 0;  // offspring no repair could make valid
    double elapsed_seconds = 0.0;
};

// Called with every individual right before it is offered to the archive.
using OfferObserver = std::function<void(const IndividualTree&, const Evaluation&)>;

inline GenerationRecord snapshot(const ElitesArchive& archive, int generation) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.cells = archive.cell_totals();
    rec.occupied = archive.occupied_count();
    double sum = 0;
    bool first = true;
    for (const auto& c : rec.cells) {
        if (!c) continue;
        sum += *c;
        rec.best = first ? *c : std::min(rec.best, *c);
        rec.worst = first ? *c : std::max(rec.worst, *c);
        first = false;
    }
    if (rec.occupied) rec.mean = sum / static_cast<double>(rec.occupied);
    return rec;
}

// Full repair pipeline applied to every offspring before evaluation.
inline IndividualTree repair_offspring(IndividualTree tree, const GenerationGoals& goals, Rng& rng) {
    tree = repair_lock_keys(std::move(tree), rng);
    tree = ensure_lock_exists(std::move(tree), rng);
    return repair_enemies(std::move(tree), goals, rng);
}

inline RunResult run(const GenerationGoals& goals, const EvolutionConfig& config, const OfferObserver& observer = {}) {
    validate(goals);
    validate(config);
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    auto out_of_time = [&] {
        return config.time_budget && Clock::now() - started >= *config.time_budget;
    };

    RunResult result;
    Rng rng(config.rng_seed);
    auto offer = [&](IndividualTree& tree) {
        const Evaluation e = evaluate(tree, goals);
        if (observer) observer(tree, e);
        result.archive.offer(tree, e.fitness, e.descriptors);
    };

    while (static_cast<int>(result.archive.occupied_count()) < config.initial_population &&
           result.init_attempts < static_cast<std::size_t>(config.init_attempt_cap)) {
        if (result.archive.occupied_count() > 0 && out_of_time()) break;
        ++result.init_attempts;
        IndividualTree tree;
        try {
            tree = random_individual(goals, rng, config.init_attempt_cap);
        } catch (const InitExhausted&) {
            continue;
        } catch (const NoEligibleRoom&) {
            continue;
        }
        tree.lineage = mix_seed(config.rng_seed, result.init_attempts);
        offer(tree);
    }
    if (result.archive.occupied_count() == 0) throw InitExhausted("initialization produced no mappable individual");
    result.log.push_back(snapshot(result.archive, 0));

    while ((!config.max_generations || result.generations < *config.max_generations) && !out_of_time()) {
        std::vector<IndividualTree> offspring;
        offspring.reserve(static_cast<std::size_t>(config.intermediate_population));
        const std::size_t discard_limit = result.discarded + 10 * static_cast<std::size_t>(config.intermediate_population);
        while (static_cast<int>(offspring.size()) < config.intermediate_population && result.discarded < discard_limit) {
            const IndividualTree a = result.archive.sample_parent(rng);
            const IndividualTree b = result.archive.sample_parent(rng);
            auto [ca, cb] = crossover(a, b, rng);
            for (IndividualTree* child : {&ca, &cb}) {
                if (static_cast<int>(offspring.size()) >= config.intermediate_population) break;
                if (rng.chance(config.mutation_rate)) *child = mutate(std::move(*child), rng, config.add_remove_split);
                try {
                    *child = repair_offspring(std::move(*child), goals, rng);
                } catch (const NoEligibleRoom&) {
                    ++result.discarded;
                    continue;
                }
                child->lineage = mix_seed(a.lineage, b.lineage);
                offspring.push_back(std::move(*child));
            }
        }
        for (auto& child : offspring) offer(child);
        ++result.generations;
        result.log.push_back(snapshot(result.archive, result.generations));
    }
    result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return result;
}

}  // namespace dungeon_elites
