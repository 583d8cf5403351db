#pragma once

// Genotype: a tree of rooms. Each non-root room remembers the side of its
// parent it hangs from; keys and locks are bound through a shared id.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace dungeon_elites {

enum class RoomKind : std::uint8_t { Normal, Key, Locked };

struct RoomType {
    RoomKind kind = RoomKind::Normal;
    int id = 0;  // shared key/lock id; 0 for Normal

    static constexpr RoomType normal() { return {}; }
    static constexpr RoomType key(int id) { return {RoomKind::Key, id}; }
    static constexpr RoomType locked(int id) { return {RoomKind::Locked, id}; }

    constexpr bool is_normal() const { return kind == RoomKind::Normal; }
    constexpr bool is_key() const { return kind == RoomKind::Key; }
    constexpr bool is_locked() const { return kind == RoomKind::Locked; }

    friend constexpr bool operator==(const RoomType&, const RoomType&) = default;
};

enum class Direction : std::uint8_t { Right, Down, Left };

inline constexpr std::array<Direction, 3> kAllDirections{Direction::Right, Direction::Down, Direction::Left};

constexpr char direction_letter(Direction d) {
    switch (d) {
        case Direction::Right: return 'R';
        case Direction::Down: return 'D';
        case Direction::Left: return 'L';
    }
    return '?';
}

struct DescriptorPair {
    double leniency = 0.0;
    double exploration = 0.0;
    friend bool operator==(const DescriptorPair&, const DescriptorPair&) = default;
};

struct FitnessBreakdown {
    double f_goal = 0.0;
    double f_es = 0.0;
    double f_std = 0.0;
    double total = 0.0;  // f_goal - f_es + f_std; lower is better

    static FitnessBreakdown combine(double goal, double es, double stdev) {
        return {goal, es, stdev, goal - es + stdev};
    }
    friend bool operator==(const FitnessBreakdown&, const FitnessBreakdown&) = default;
};

struct RoomNode {
    int node_id = 0;
    RoomType room_type;
    std::optional<Direction> direction;  // empty only on the root
    int enemies = 0;
    std::vector<RoomNode> children;  // insertion order, at most one per Direction

    bool has_child(Direction d) const {
        return std::any_of(children.begin(), children.end(), [d](const RoomNode& c) { return c.direction == d; });
    }

    std::vector<Direction> free_directions() const {
        std::vector<Direction> out;
        for (Direction d : kAllDirections)
            if (!has_child(d)) out.push_back(d);
        return out;
    }

    friend bool operator==(const RoomNode&, const RoomNode&) = default;
};

struct IndividualTree {
    RoomNode root;
    int next_node_id = 1;
    int next_shared_id = 1;
    std::uint64_t lineage = 0;  // seed provenance, not part of the level
    std::optional<FitnessBreakdown> cached_fitness;
    std::optional<DescriptorPair> cached_descriptors;

    IndividualTree() { root.node_id = 0; }

    int fresh_node_id() { return next_node_id++; }
    int fresh_shared_id() { return next_shared_id++; }

    void invalidate() {
        cached_fitness.reset();
        cached_descriptors.reset();
    }

    // Structural equality; provenance and caches are ignored.
    bool same_structure(const IndividualTree& other) const { return root == other.root; }
};

namespace detail {

template <typename Node, typename Fn>
void preorder(Node& node, Fn&& fn) {
    fn(node);
    for (auto& c : node.children) preorder(c, fn);
}

template <typename Node>
Node* find(Node& node, int id) {
    if (node.node_id == id) return &node;
    for (auto& c : node.children)
        if (auto* hit = find(c, id)) return hit;
    return nullptr;
}

template <typename Node>
Node* find_parent(Node& node, int id) {
    for (auto& c : node.children) {
        if (c.node_id == id) return &node;
        if (auto* hit = find_parent(c, id)) return hit;
    }
    return nullptr;
}

}  // namespace detail

template <typename Fn>
void for_each_room(const IndividualTree& tree, Fn&& fn) {
    detail::preorder(tree.root, fn);
}

template <typename Fn>
void for_each_room(IndividualTree& tree, Fn&& fn) {
    detail::preorder(tree.root, fn);
}

inline const RoomNode* find_node(const IndividualTree& tree, int id) { return detail::find(tree.root, id); }
inline RoomNode* find_node(IndividualTree& tree, int id) { return detail::find(tree.root, id); }

inline RoomNode& node_at(IndividualTree& tree, int id) {
    auto* n = find_node(tree, id);
    if (!n) throw NodeNotFound(id);
    return *n;
}

inline const RoomNode* find_parent(const IndividualTree& tree, int id) { return detail::find_parent(tree.root, id); }
inline RoomNode* find_parent(IndividualTree& tree, int id) { return detail::find_parent(tree.root, id); }

inline std::size_t subtree_size(const RoomNode& node) {
    std::size_t n = 0;
    detail::preorder(node, [&n](const RoomNode&) { ++n; });
    return n;
}

inline std::size_t node_count(const IndividualTree& tree) { return subtree_size(tree.root); }

inline int total_enemies(const IndividualTree& tree) {
    int n = 0;
    for_each_room(tree, [&n](const RoomNode& r) { n += r.enemies; });
    return n;
}

// Level by level; within a level, parents' children in stored order.
inline std::vector<const RoomNode*> traverse_breadth_first(const IndividualTree& tree) {
    std::vector<const RoomNode*> out;
    std::deque<const RoomNode*> queue{&tree.root};
    while (!queue.empty()) {
        const RoomNode* n = queue.front();
        queue.pop_front();
        out.push_back(n);
        for (const auto& c : n->children) queue.push_back(&c);
    }
    return out;
}

inline std::vector<int> breadth_first_ids(const IndividualTree& tree) {
    std::vector<int> ids;
    for (const RoomNode* n : traverse_breadth_first(tree)) ids.push_back(n->node_id);
    return ids;
}

struct LockKeyPair {
    int key_node = 0;
    int lock_node = 0;
    int shared_id = 0;
    friend bool operator==(const LockKeyPair&, const LockKeyPair&) = default;
};

// One entry per shared id, ordered by shared id.
inline std::vector<LockKeyPair> collect_lock_key_pairs(const IndividualTree& tree) {
    std::map<int, std::vector<int>> keys;
    std::map<int, std::vector<int>> locks;
    for_each_room(tree, [&](const RoomNode& r) {
        if (r.room_type.is_key()) keys[r.room_type.id].push_back(r.node_id);
        if (r.room_type.is_locked()) locks[r.room_type.id].push_back(r.node_id);
    });
    std::vector<LockKeyPair> out;
    for (const auto& [id, ks] : keys) {
        auto it = locks.find(id);
        if (ks.size() != 1 || it == locks.end() || it->second.size() != 1)
            throw UnpairedKeyOrLock("key id " + std::to_string(id) + " has no unique matching lock");
        out.push_back({ks.front(), it->second.front(), id});
    }
    for (const auto& [id, ls] : locks)
        if (!keys.contains(id)) throw UnpairedKeyOrLock("lock id " + std::to_string(id) + " has no matching key");
    return out;
}

inline bool pairing_valid(const IndividualTree& tree) {
    try {
        collect_lock_key_pairs(tree);
        return true;
    } catch (const UnpairedKeyOrLock&) {
        return false;
    }
}

// Removes the node and its whole subtree. Pairing may be broken afterwards.
inline IndividualTree detach_branch(IndividualTree tree, int node_id) {
    if (tree.root.node_id == node_id) throw CannotDetachRoot();
    RoomNode* parent = find_parent(tree, node_id);
    if (!parent) throw NodeNotFound(node_id);
    std::erase_if(parent->children, [node_id](const RoomNode& c) { return c.node_id == node_id; });
    tree.invalidate();
    return tree;
}

// Attaches a new Normal room under `parent_id`; returns its id.
inline int attach_child(IndividualTree& tree, int parent_id, Direction dir, RoomType type = {}, int enemies = 0) {
    RoomNode& parent = node_at(tree, parent_id);
    if (parent.has_child(dir)) throw DungeonError("direction slot already taken");
    RoomNode child;
    child.node_id = tree.fresh_node_id();
    child.room_type = type;
    child.direction = dir;
    child.enemies = enemies;
    parent.children.push_back(std::move(child));
    tree.invalidate();
    if (type.id >= tree.next_shared_id) tree.next_shared_id = type.id + 1;
    return parent.children.back().node_id;
}

// Equal shape, directions, room types, and enemies; node ids are ignored.
inline bool same_rooms(const RoomNode& a, const RoomNode& b) {
    if (a.room_type != b.room_type || a.direction != b.direction || a.enemies != b.enemies ||
        a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!same_rooms(a.children[i], b.children[i])) return false;
    return true;
}

inline bool same_rooms(const IndividualTree& a, const IndividualTree& b) { return same_rooms(a.root, b.root); }

// Node id -> depth (root = 0).
inline std::map<int, int> depths(const IndividualTree& tree) {
    std::map<int, int> out;
    auto rec = [&out](auto&& self, const RoomNode& n, int d) -> void {
        out[n.node_id] = d;
        for (const auto& c : n.children) self(self, c, d + 1);
    };
    rec(rec, tree.root, 0);
    return out;
}

// Compact genotype notation, e.g. "S[D[D[R[L#2]]],L#1[R+2],R[D,L,R+1]]".
// '+k' marks a key room, '#k' a locked room, '*n' enemies.
inline std::string to_string(const RoomNode& n, bool is_root = true) {
    std::string s(1, is_root ? 'S' : direction_letter(*n.direction));
    if (n.room_type.is_key()) s += "+" + std::to_string(n.room_type.id);
    if (n.room_type.is_locked()) s += "#" + std::to_string(n.room_type.id);
    if (n.enemies > 0) s += "*" + std::to_string(n.enemies);
    if (!n.children.empty()) {
        s += '[';
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) s += ',';
            s += to_string(n.children[i], false);
        }
        s += ']';
    }
    return s;
}

inline std::string to_string(const IndividualTree& tree) { return to_string(tree.root); }

namespace detail {

class TreeParser {
public:
    explicit TreeParser(std::string_view text) : text_(text) {}

    IndividualTree parse() {
        IndividualTree tree;
        if (peek() != 'S') fail("expected 'S' at the root");
        ++pos_;
        body(tree, tree.root);
        if (pos_ != text_.size()) fail("trailing characters");
        return tree;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    [[noreturn]] void fail(const std::string& what) const {
        throw DungeonError("tree notation, offset " + std::to_string(pos_) + ": " + what);
    }

    int number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
        if (start == pos_) fail("expected a number");
        return std::stoi(std::string(text_.substr(start, pos_ - start)));
    }

    void body(IndividualTree& tree, RoomNode& node) {
        if (peek() == '+') {
            ++pos_;
            node.room_type = RoomType::key(number());
        } else if (peek() == '#') {
            ++pos_;
            node.room_type = RoomType::locked(number());
        }
        if (node.room_type.id >= tree.next_shared_id) tree.next_shared_id = node.room_type.id + 1;
        if (peek() == '*') {
            ++pos_;
            node.enemies = number();
        }
        if (peek() != '[') return;
        ++pos_;
        while (true) {
            RoomNode child;
            switch (peek()) {
                case 'R': child.direction = Direction::Right; break;
                case 'D': child.direction = Direction::Down; break;
                case 'L': child.direction = Direction::Left; break;
                default: fail("expected R, D or L");
            }
            if (node.has_child(*child.direction)) fail("duplicate direction");
            ++pos_;
            child.node_id = tree.fresh_node_id();
            node.children.push_back(std::move(child));
            body(tree, node.children.back());
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ']') {
                ++pos_;
                return;
            }
            fail("expected ',' or ']'");
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Inverse of to_string. Node ids are assigned in pre-order starting at 0.
inline IndividualTree parse_tree(std::string_view text) { return detail::TreeParser(text).parse(); }

}  // namespace dungeon_elites
