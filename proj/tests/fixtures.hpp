#pragma once

// Shared hand-built levels for the unit tests.

#include <dungeon_elites/dungeon_elites.hpp>

namespace fixtures {

// Three children under the start (Down, Left, Right), two keys and two locks.
inline constexpr const char* kReferenceTree = "S[D[D[R[L#2]]],L#1[R+2],R[D,L,R+1]]";

inline dungeon_elites::IndividualTree reference_tree() { return dungeon_elites::parse_tree(kReferenceTree); }

inline dungeon_elites::LevelGrid reference_grid() { return dungeon_elites::decode_with_goal(reference_tree()); }

// A straight corridor of `n` rooms heading south from the start.
inline std::string path_notation(int n, const std::string& last_suffix = "") {
    std::string s = "S";
    for (int i = 1; i < n; ++i) s += "[D";
    s += last_suffix;
    for (int i = 1; i < n; ++i) s += "]";
    return s;
}

}  // namespace fixtures
