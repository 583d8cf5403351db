#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace dungeon_elites;

namespace {

LevelDocument reference_document() {
    auto tree = parse_tree("S[D*3[D*2[R*1[L#2]]],L#1[R+2*4],R[D*6,L*5,R+1*9]]");
    return make_document(tree, {11, 2, 2, 30, 1.5}, 5);
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Document, FieldsFromTree) {
    const auto doc = reference_document();
    EXPECT_EQ(doc.grid.room_count(), 11u);
    EXPECT_EQ(doc.grid.goal, (GridCoord{-2, 6}));
    EXPECT_EQ(doc.genotype, "S[D*3[D*2[R*1[L#2]]],L#1[R+2*4],R[D*6,L*5,R+1*9]]");
    const auto e = evaluate_grid(doc.grid, doc.goals);
    EXPECT_EQ(doc.fitness, e.fitness);
    EXPECT_EQ(doc.descriptors, e.descriptors);
    EXPECT_EQ(doc.cell, bin(e.descriptors) ? std::optional(bin(e.descriptors)->label()) : std::nullopt);
}

TEST(Document, RoundTrip) {
    const auto doc = reference_document();
    const auto text = serialize(doc);
    const auto back = parse_document(text);
    EXPECT_EQ(back.grid, doc.grid);
    EXPECT_EQ(back.descriptors, doc.descriptors);
    EXPECT_EQ(back.fitness, doc.fitness);
    EXPECT_EQ(back.goals, doc.goals);
    EXPECT_EQ(back.rng_seed, doc.rng_seed);
    EXPECT_EQ(back.genotype, doc.genotype);
    EXPECT_EQ(back.cell, doc.cell);
    EXPECT_TRUE(back.read_issues.empty());
    EXPECT_EQ(serialize(back), text);
}

TEST(Document, JsonShape) {
    const auto j = nlohmann::json::parse(serialize(reference_document()));
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("rooms").size(), 11u);
    EXPECT_EQ(j.at("corridors").size(), 10u);
    const auto& first = j.at("rooms").at(0);
    EXPECT_TRUE(first.at("is_start").get<bool>());
    EXPECT_TRUE(first.at("parent").is_null());
    EXPECT_EQ(j.at("goals").at("linear_coefficient"), 1.5);
}

TEST(Document, MalformedJson) {
    EXPECT_THROW(parse_document("{not json"), DocumentError);
    EXPECT_THROW(parse_document("[]"), DocumentError);
    EXPECT_THROW(parse_document(R"({"schema_version": 2})"), DocumentError);
    auto j = nlohmann::json::parse(serialize(reference_document()));
    j["rooms"][3]["type"] = "trapdoor";
    EXPECT_THROW(parse_document(j.dump()), DocumentError);
    j = nlohmann::json::parse(serialize(reference_document()));
    j["rooms"][2].erase("enemies");
    EXPECT_THROW(parse_document(j.dump()), DocumentError);
}

TEST(Document, MissingFile) { EXPECT_THROW(load_document("/nonexistent/level.json"), DocumentError); }

TEST(Render, ReferenceText) {
    // x from -4 to 2, y from -2 to 6; rooms are S, G, keys, or enemy counts
    const auto doc = make_document(fixtures::reference_tree(), {11, 2, 2, 0, 1.5}, 0);
    const std::string expected =
        "        k1\n"
        "         |\n"
        " #   -   #   -   S  |1|  #\n"
        "         |       |       |\n"
        "         #       #      k2\n"
        "                 |\n"
        "         #   -   #\n"
        "        |2|\n"
        "         G\n";
    EXPECT_EQ(render_text(doc.grid), expected);
}

TEST(Render, SingleRoom) {
    LevelGrid g = decode(IndividualTree{}).grid;
    EXPECT_EQ(render_text(g), "S\n");
}

TEST(Render, EnemyCountsAndSvg) {
    const auto doc = reference_document();
    const auto text = render_text(doc.grid);
    EXPECT_NE(text.find('6'), std::string::npos);
    EXPECT_NE(text.find("|2|"), std::string::npos);
    const auto svg = render_svg(doc.grid);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    std::size_t rooms = 0, at = 0;
    while ((at = svg.find("class=\"room\"", at)) != std::string::npos) ++rooms, ++at;
    EXPECT_EQ(rooms, 11u);
    EXPECT_NE(svg.find("class=\"key\""), std::string::npos);
    EXPECT_NE(svg.find(detail::lock_colour(1)), std::string::npos);
}

TEST(Validate, GeneratedLevelPasses) {
    const GenerationGoals goals{15, 3, 2, 20, 2};
    Rng rng(4);
    for (int i = 0; i < 10; ++i) {
        const auto doc = make_document(random_individual(goals, rng), goals, 4);
        EXPECT_TRUE(check_document(parse_document(serialize(doc))).empty());
    }
}

TEST(Validate, EnemyInGoalRoom) {
    auto j = nlohmann::json::parse(serialize(reference_document()));
    for (auto& r : j["rooms"])
        if (r["is_goal"].get<bool>()) r["enemies"] = 2;
    for (auto& r : j["rooms"])
        if (r["enemies"].get<int>() == 9) r["enemies"] = 7;
    const auto v = check_document(parse_document(j.dump()));
    EXPECT_TRUE(mentions(v, "goal room holds enemies"));
}

TEST(Validate, StaleFitness) {
    auto doc = reference_document();
    doc.fitness.f_std += 0.25;
    const auto v = check_document(parse_document(serialize(doc)));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(mentions(v, "f_std"));
}

TEST(Validate, StaleDescriptor) {
    auto doc = reference_document();
    doc.descriptors.exploration = 0.5;
    EXPECT_TRUE(mentions(check_document(doc), "exploration"));
}

TEST(Validate, StructuralViolations) {
    const auto base = nlohmann::json::parse(serialize(reference_document()));

    auto j = base;
    for (auto& r : j["rooms"])
        if (r["is_goal"].get<bool>()) r["x"] = -1;
    EXPECT_TRUE(mentions(check_document(parse_document(j.dump())), "even coordinates"));

    // moving an inner room orphans its children
    j = base;
    j["rooms"][1]["x"] = 6;
    EXPECT_THROW(parse_document(j.dump()), DocumentError);

    j = base;
    j["corridors"].erase(0);
    EXPECT_TRUE(mentions(check_document(parse_document(j.dump())), "corridor"));

    j = base;
    for (auto& r : j["rooms"])
        if (r["type"] == "key" && r["key_id"] == 2) {
            r["type"] = "normal";
            r.erase("key_id");
        }
    auto v = check_document(parse_document(j.dump()));
    EXPECT_TRUE(mentions(v, "lock 2 has no key"));

    j = base;
    j["rooms"][4]["enemies"] = j["rooms"][4]["enemies"].get<int>() + 1;
    EXPECT_TRUE(mentions(check_document(parse_document(j.dump())), "enemies"));

    j = base;
    j["rooms"].push_back(j["rooms"][5]);
    EXPECT_TRUE(mentions(check_document(parse_document(j.dump())), "share cell"));
}

TEST(Validate, IndividualChecks) {
    const GenerationGoals g{11, 2, 2, 0, 1.5};
    EXPECT_TRUE(check_individual(fixtures::reference_tree(), g).empty());
    EXPECT_FALSE(check_individual(parse_tree("S[R[L],D[R]]"), g).empty());
    EXPECT_FALSE(check_individual(parse_tree("S[D+1[D#1*2]]"), g).empty());
    EXPECT_FALSE(check_individual(parse_tree("S[D#1[D+1]]"), g).empty());
}

TEST(Manifest, StableAndComplete) {
    EvolutionConfig c;
    c.max_generations = 2;
    c.time_budget.reset();
    c.rng_seed = 8;
    const GenerationGoals goals{};
    const auto r = run(goals, c);
    const auto m = make_manifest(r, goals, 8);
    EXPECT_EQ(m.at("cells").size(), r.archive.occupied_count());
    EXPECT_EQ(m.at("generations"), 2);
    EXPECT_FALSE(m.contains("elapsed_seconds"));
    EXPECT_EQ(cell_file_name({0, 4}), "L1-E5.json");
}
