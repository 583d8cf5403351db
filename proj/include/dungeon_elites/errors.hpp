#pragma once

#include <stdexcept>
#include <string>

namespace dungeon_elites {

class DungeonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lock/key bijection broken; a repair step upstream did not run or failed.
struct UnpairedKeyOrLock : DungeonError {
    using DungeonError::DungeonError;
};

struct CannotDetachRoot : DungeonError {
    CannotDetachRoot() : DungeonError("the root room cannot be detached") {}
};

struct NodeNotFound : DungeonError {
    explicit NodeNotFound(int id) : DungeonError("no room with node id " + std::to_string(id)) {}
};

struct NoLockedRoom : DungeonError {
    NoLockedRoom() : DungeonError("level has no locked room; the goal cannot be resolved") {}
};

struct DegenerateLevel : DungeonError {
    using DungeonError::DungeonError;
};

struct NoEligibleRoom : DungeonError {
    using DungeonError::DungeonError;
};

struct EmptyArchive : DungeonError {
    EmptyArchive() : DungeonError("archive has no elites to select from") {}
};

struct InitExhausted : DungeonError {
    using DungeonError::DungeonError;
};

struct DocumentError : DungeonError {
    using DungeonError::DungeonError;
};

}  // namespace dungeon_elites
