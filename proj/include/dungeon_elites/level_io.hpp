#pragma once

// JSON level documents and archive manifests.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "archive.hpp"
#include "decoder.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "fitness.hpp"
#include "model.hpp"

namespace dungeon_elites {

inline constexpr int kSchemaVersion = 1;

struct LevelDocument {
    int schema_version = kSchemaVersion;
    GenerationGoals goals;
    std::uint64_t rng_seed = 0;
    std::optional<std::string> cell;
    std::string genotype;
    LevelGrid grid;
    DescriptorPair descriptors;
    FitnessBreakdown fitness;
    // Structural problems noticed while reading (duplicate cells and such);
    // never serialized.
    std::vector<std::string> read_issues;
};

inline LevelDocument make_document(const IndividualTree& tree, const GenerationGoals& goals, std::uint64_t seed) {
    LevelDocument doc;
    doc.goals = goals;
    doc.rng_seed = seed;
    auto decoded = decode(tree);
    resolve_goal(decoded.grid);
    const Evaluation e = evaluate_grid(decoded.grid, goals);
    doc.genotype = to_string(decoded.pruned);
    doc.grid = std::move(decoded.grid);
    doc.descriptors = e.descriptors;
    doc.fitness = e.fitness;
    if (auto b = bin(e.descriptors)) doc.cell = b->label();
    return doc;
}

inline nlohmann::json to_json(const GenerationGoals& g) {
    return {{"rooms", g.rooms},
            {"keys", g.keys},
            {"locks", g.locks},
            {"enemies", g.enemies},
            {"linear_coefficient", g.linear_coefficient}};
}

inline nlohmann::json to_json(const DescriptorPair& d) {
    return {{"leniency", d.leniency}, {"exploration", d.exploration}};
}

inline nlohmann::json to_json(const FitnessBreakdown& f) {
    return {{"f_goal", f.f_goal}, {"f_es", f.f_es}, {"f_std", f.f_std}, {"total", f.total}};
}

inline nlohmann::json to_json(const LevelDocument& doc) {
    using nlohmann::json;
    json rooms = json::array();
    for (GridCoord c : doc.grid.placement_order) {
        const PlacedRoom& r = doc.grid.room(c);
        json j = {{"node_id", r.node_id}, {"x", c.x}, {"y", c.y}};
        switch (r.room_type.kind) {
            case RoomKind::Normal: j["type"] = "normal"; break;
            case RoomKind::Key:
                j["type"] = "key";
                j["key_id"] = r.room_type.id;
                break;
            case RoomKind::Locked:
                j["type"] = "locked";
                j["lock_id"] = r.room_type.id;
                break;
        }
        j["enemies"] = r.enemies;
        j["is_start"] = c == doc.grid.start;
        j["is_goal"] = doc.grid.goal && c == *doc.grid.goal;
        j["parent"] = r.parent ? json::array({r.parent->x, r.parent->y}) : json(nullptr);
        rooms.push_back(std::move(j));
    }
    json corridors = json::array();
    for (const auto& [c, corridor] : doc.grid.corridors) {
        json j = {{"x", c.x}, {"y", c.y}};
        if (corridor.lock_id) j["lock_id"] = *corridor.lock_id;
        corridors.push_back(std::move(j));
    }
    json out = {{"schema_version", doc.schema_version},
                {"goals", to_json(doc.goals)},
                {"rng_seed", doc.rng_seed},
                {"genotype", doc.genotype},
                {"rooms", std::move(rooms)},
                {"corridors", std::move(corridors)},
                {"descriptors", to_json(doc.descriptors)},
                {"fitness", to_json(doc.fitness)}};
    out["cell"] = doc.cell ? json(*doc.cell) : json(nullptr);
    return out;
}

namespace detail {

template <typename T>
T field(const nlohmann::json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw DocumentError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DocumentError(std::string("field '") + name + "' has the wrong type");
    }
}

}  // namespace detail

inline GenerationGoals goals_from_json(const nlohmann::json& j) {
    using detail::field;
    return {field<int>(j, "rooms"), field<int>(j, "keys"), field<int>(j, "locks"), field<int>(j, "enemies"),
            field<double>(j, "linear_coefficient")};
}

inline LevelDocument document_from_json(const nlohmann::json& j) {
    using detail::field;
    LevelDocument doc;
    doc.schema_version = field<int>(j, "schema_version");
    if (doc.schema_version != kSchemaVersion)
        throw DocumentError("unsupported schema version " + std::to_string(doc.schema_version));
    doc.goals = goals_from_json(j.at("goals"));
    doc.rng_seed = field<std::uint64_t>(j, "rng_seed");
    if (j.contains("genotype")) doc.genotype = field<std::string>(j, "genotype");
    if (j.contains("cell") && !j.at("cell").is_null()) doc.cell = field<std::string>(j, "cell");

    const auto& rooms = j.at("rooms");
    if (!rooms.is_array()) throw DocumentError("'rooms' must be an array");
    bool have_start = false;
    for (const auto& r : rooms) {
        const GridCoord c{field<int>(r, "x"), field<int>(r, "y")};
        PlacedRoom room;
        room.node_id = field<int>(r, "node_id");
        room.enemies = field<int>(r, "enemies");
        const auto type = field<std::string>(r, "type");
        if (type == "key")
            room.room_type = RoomType::key(field<int>(r, "key_id"));
        else if (type == "locked")
            room.room_type = RoomType::locked(field<int>(r, "lock_id"));
        else if (type != "normal")
            throw DocumentError("unknown room type '" + type + "'");
        if (r.contains("parent") && !r.at("parent").is_null()) {
            const auto& p = r.at("parent");
            if (!p.is_array() || p.size() != 2) throw DocumentError("'parent' must be [x, y]");
            const GridCoord pc{p[0].get<int>(), p[1].get<int>()};
            auto it = doc.grid.rooms.find(pc);
            if (it == doc.grid.rooms.end()) throw DocumentError("room listed before its parent");
            room.parent = pc;
            room.depth = it->second.depth + 1;
        }
        if (doc.grid.rooms.contains(c)) {
            doc.read_issues.push_back("two rooms share cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
            continue;
        }
        if (room.parent) doc.grid.rooms.at(*room.parent).children.push_back(c);
        if (field<bool>(r, "is_start")) {
            if (have_start) doc.read_issues.push_back("more than one start room");
            doc.grid.start = c;
            have_start = true;
        }
        if (field<bool>(r, "is_goal")) {
            if (doc.grid.goal) doc.read_issues.push_back("more than one goal room");
            doc.grid.goal = c;
        }
        doc.grid.rooms.emplace(c, std::move(room));
        doc.grid.placement_order.push_back(c);
    }
    if (!have_start) doc.read_issues.push_back("no start room");

    const auto& corridors = j.at("corridors");
    if (!corridors.is_array()) throw DocumentError("'corridors' must be an array");
    for (const auto& cj : corridors) {
        const GridCoord c{field<int>(cj, "x"), field<int>(cj, "y")};
        PlacedCorridor corridor;
        if (cj.contains("lock_id")) corridor.lock_id = field<int>(cj, "lock_id");
        if (!doc.grid.corridors.emplace(c, corridor).second)
            doc.read_issues.push_back("two corridors share cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    }

    const auto& d = j.at("descriptors");
    doc.descriptors = {field<double>(d, "leniency"), field<double>(d, "exploration")};
    const auto& f = j.at("fitness");
    doc.fitness = {field<double>(f, "f_goal"), field<double>(f, "f_es"), field<double>(f, "f_std"),
                   field<double>(f, "total")};
    return doc;
}

inline std::string serialize(const LevelDocument& doc) { return to_json(doc).dump(2) + "\n"; }

inline LevelDocument parse_document(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DocumentError(std::string("malformed JSON: ") + e.what());
    }
    try {
        return document_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DocumentError(std::string("malformed level document: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DocumentError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DocumentError("cannot write " + path);
    out << content;
    if (!out.flush()) throw DocumentError("write failed for " + path);
}

inline LevelDocument load_document(const std::string& path) { return parse_document(read_file(path)); }

inline std::string cell_file_name(BinIndex b) { return b.label() + ".json"; }

// Deterministic given (goals, seed, generation count): no wall-clock data.
inline nlohmann::json make_manifest(const RunResult& run, const GenerationGoals& goals, std::uint64_t seed) {
    using nlohmann::json;
    json cells = json::array();
    for (const auto& [b, elite] : run.archive.occupied_cells()) {
        cells.push_back({{"cell", b.label()},
                         {"file", cell_file_name(b)},
                         {"genotype", to_string(elite->tree)},
                         {"fitness", to_json(elite->fitness)},
                         {"descriptors", to_json(elite->descriptors)}});
    }
    const auto& s = run.archive.stats();
    return {{"schema_version", kSchemaVersion},
            {"goals", to_json(goals)},
            {"rng_seed", seed},
            {"generations", run.generations},
            {"init_attempts", run.init_attempts},
            {"discarded_offspring", run.discarded},
            {"occupied", run.archive.occupied_count()},
            {"insertion_stats",
             {{"attempts", s.attempts},
              {"inserts", s.inserts},
              {"replacements", s.replacements},
              {"out_of_range", s.out_of_range},
              {"rejected", s.rejected}}},
            {"cells", std::move(cells)}};
}

}  // namespace dungeon_elites
