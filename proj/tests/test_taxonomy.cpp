#include <doctest.h>

#include <random>

#include "support.hpp"
#include "trouter/taxonomy.hpp"

using namespace trouter;
using taxonomy::Level;
using taxonomy::TaskNode;
using taxonomy::TaskProfile;
using taxonomy::Taxonomy;

namespace {

/// Test-side parser for the rendered profile template; written against the
/// template's field order, independent of the renderer.
struct ParsedProfile {
    std::string domain_name, domain_definition;
    std::string subcategory_name, subcategory_definition;
    std::string difficulty_name, difficulty_definition;

    bool operator==(const ParsedProfile&) const = default;
};

ParsedProfile parse_profile_text(const std::string& text) {
    const std::vector<std::pair<std::string, std::string ParsedProfile::*>> fields = {
        {"\nTask Domain: ", &ParsedProfile::domain_name},
        {"\nDomain Definition: ", &ParsedProfile::domain_definition},
        {"\nTask Subcategory: ", &ParsedProfile::subcategory_name},
        {"\nSubcategory Definition: ", &ParsedProfile::subcategory_definition},
        {"\nTask Difficulty: ", &ParsedProfile::difficulty_name},
        {"\nDifficulty Definition: ", &ParsedProfile::difficulty_definition},
    };
    ParsedProfile parsed;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto start = text.find(fields[i].first);
        REQUIRE(start != std::string::npos);
        const auto value_start = start + fields[i].first.size();
        const auto end = i + 1 < fields.size() ? text.find(fields[i + 1].first, value_start)
                                               : text.size();
        parsed.*(fields[i].second) = text.substr(value_start, end - value_start);
    }
    return parsed;
}

TaskNode make_node(Level level, const std::string& name, std::vector<TaskNode> children = {}) {
    TaskNode node;
    node.level = level;
    node.short_name = name;
    node.definition = "Definition of " + name + ".";
    node.example = "Example for " + name + ".";
    node.children = std::move(children);
    return node;
}

Taxonomy random_taxonomy(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> domains(1, 4);
    std::uniform_int_distribution<int> subcats(1, 6);
    std::uniform_int_distribution<int> levels(1, 5);
    std::vector<TaskNode> roots;
    const int nd = domains(rng);
    for (int d = 0; d < nd; ++d) {
        std::vector<TaskNode> subs;
        const int ns = subcats(rng);
        for (int s = 0; s < ns; ++s) {
            std::vector<TaskNode> leaves;
            const int nl = levels(rng);
            for (int l = 0; l < nl; ++l)
                leaves.push_back(make_node(Level::Difficulty, "L" + std::to_string(l)));
            subs.push_back(make_node(Level::Subcategory, "S" + std::to_string(s),
                                     std::move(leaves)));
        }
        roots.push_back(make_node(Level::Domain, "D" + std::to_string(d), std::move(subs)));
    }
    return Taxonomy(std::move(roots));
}

}  // namespace

TEST_CASE("flatten_difficulty counts leaves in depth-first order") {
    const auto taxonomy = testsupport::toy_taxonomy();
    const auto profiles = taxonomy.flatten_difficulty();
    REQUIRE(profiles.size() == 3);
    CHECK(profiles[0].difficulty_name == "Easy");
    CHECK(profiles[1].difficulty_name == "Medium");
    CHECK(profiles[2].difficulty_name == "Hard");
    CHECK(taxonomy.difficulty_count() == 3);
}

TEST_CASE("flatten matches an independent leaf count on random trees") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const auto taxonomy = random_taxonomy(rng);
        std::size_t leaves = 0;
        for (const auto& d : taxonomy.domains())
            for (const auto& s : d.children) leaves += s.children.size();
        CHECK(taxonomy.flatten_difficulty().size() == leaves);
    }
}

TEST_CASE("render_profile emits the template fields in order, deterministically") {
    const auto taxonomy = testsupport::toy_taxonomy();
    const auto profile = taxonomy::render_profile(taxonomy, "Mathematics", "Arithmetic", "Easy");
    CHECK(profile.rendered_text == testsupport::golden("difficulty_profile.txt"));
    const auto again = taxonomy::render_profile(taxonomy, "Mathematics", "Arithmetic", "Easy");
    CHECK(profile.rendered_text == again.rendered_text);
    CHECK(profile.profile_id == again.profile_id);

    CHECK_THROWS_AS(taxonomy::render_profile(taxonomy, "Mathematics", "Algebra", "Easy"),
                    RouterError);
}

TEST_CASE("profile render/parse round-trips on random trees") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const auto taxonomy = random_taxonomy(rng);
        for (const auto& profile : taxonomy.flatten_difficulty()) {
            const auto parsed = parse_profile_text(profile.rendered_text);
            CHECK(parsed.domain_name == profile.domain_name);
            CHECK(parsed.domain_definition == profile.domain_definition);
            CHECK(parsed.subcategory_name == profile.subcategory_name);
            CHECK(parsed.subcategory_definition == profile.subcategory_definition);
            CHECK(parsed.difficulty_name == profile.difficulty_name);
            CHECK(parsed.difficulty_definition == profile.difficulty_definition);
        }
    }
}

TEST_CASE("profile ids are stable and distinct per path") {
    const auto id1 = taxonomy::profile_id_for("Mathematics", "Arithmetic", "Easy");
    const auto id2 = taxonomy::profile_id_for("Mathematics", "Arithmetic", "Easy");
    CHECK(id1 == id2);
    CHECK(id1 != taxonomy::profile_id_for("Mathematics", "Arithmetic", "Hard"));
    // separator keeps concatenation ambiguity out of the id
    CHECK(taxonomy::profile_id_for("ab", "c", "d") != taxonomy::profile_id_for("a", "bc", "d"));
}

TEST_CASE("save and load round-trip the canonical form") {
    testsupport::TempDir dir("taxonomy");
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 10; ++trial) {
        const auto taxonomy = random_taxonomy(rng);
        const auto path = dir.file("tax" + std::to_string(trial) + ".json");
        taxonomy.save(path);
        const auto reloaded = Taxonomy::load(path);
        CHECK(reloaded.to_json_text() == taxonomy.to_json_text());
        CHECK(reloaded.stable_hash() == taxonomy.stable_hash());
    }
}

TEST_CASE("structural caps are enforced at load time with the node path named") {
    auto thrown_message = [](auto&& fn) -> std::string {
        try {
            fn();
        } catch (const RouterError& e) {
            return e.what();
        }
        return "";
    };

    // 11 subcategories under one domain
    std::vector<TaskNode> subs;
    for (int i = 0; i < 11; ++i)
        subs.push_back(make_node(Level::Subcategory, "S" + std::to_string(i),
                                 {make_node(Level::Difficulty, "Easy")}));
    TaskNode domain = make_node(Level::Domain, "Overfull", std::move(subs));
    CHECK(thrown_message([&] { Taxonomy({domain}); }).find("Overfull") != std::string::npos);

    // 6 difficulty levels
    std::vector<TaskNode> levels;
    for (int i = 0; i < 6; ++i)
        levels.push_back(make_node(Level::Difficulty, "L" + std::to_string(i)));
    TaskNode domain2 = make_node(
        Level::Domain, "D", {make_node(Level::Subcategory, "Busy", std::move(levels))});
    CHECK(thrown_message([&] { Taxonomy({domain2}); }).find("Busy") != std::string::npos);

    // duplicate sibling names
    TaskNode domain3 = make_node(
        Level::Domain, "D",
        {make_node(Level::Subcategory, "Same", {make_node(Level::Difficulty, "Easy")}),
         make_node(Level::Subcategory, "Same", {make_node(Level::Difficulty, "Easy")})});
    CHECK_THROWS_AS(Taxonomy({domain3}), RouterError);

    // difficulty node with children
    TaskNode bad_leaf = make_node(Level::Difficulty, "Leafy",
                                  {make_node(Level::Difficulty, "Child")});
    TaskNode domain4 =
        make_node(Level::Domain, "D", {make_node(Level::Subcategory, "S", {bad_leaf})});
    CHECK_THROWS_AS(Taxonomy({domain4}), RouterError);
}

TEST_CASE("more than ten domains are rejected") {
    std::vector<TaskNode> roots;
    for (int i = 0; i < 11; ++i)
        roots.push_back(make_node(Level::Domain, "D" + std::to_string(i)));
    CHECK_THROWS_AS(Taxonomy(std::move(roots)), RouterError);
}
