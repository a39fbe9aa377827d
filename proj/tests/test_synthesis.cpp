#include <doctest.h>

#include <random>

#include "support.hpp"
#include "trouter/synthesis.hpp"

using namespace trouter;
using prompts::NodeEntry;
using synthesis::QaPair;
using testsupport::CallbackClient;

namespace {

const char* kDomainExampleBlock = R"(<node begin>
Domain: Mathematics
Definition: Covers quantitative problem-solving tasks involving numbers, equations, logic, or formal systems, including arithmetic, algebra, calculus, and more.
Example: What is the derivative of sin(x)?

Domain: Creative Writing
Definition: Involves imaginative or artistic language generation tasks such as writing poems, stories, scripts, or creative descriptions.
Example: Write a short story about a robot who learns to paint.
</node end>)";

const char* kQaExampleBlock = R"(<qa_pairs begin>
Q: What is 2+2?
A: 2+2 equals 4

Q: What is the capital of France?
A: The capital of France is Paris

Q: How does photosynthesis work?
A: Photosynthesis is the process by which plants convert sunlight into energy.
</qa_pairs end>)";

std::string revision_block(const std::vector<NodeEntry>& entries, const std::string& label) {
    return "<justification>\nfine\n</justification>\n\n<revision node begin>\n" +
           prompts::format_node_set(entries, label) + "</revision node end>\n";
}

std::string prefer(const std::string& which) {
    return "<justification>\nbecause\n</justification>\n<preferred set>\n" + which +
           "\n</preferred set>\n";
}

taxonomy::TaskProfile toy_profile() {
    return testsupport::toy_taxonomy().flatten_difficulty().front();
}

QaPair pair_with_embedding(std::string question, std::vector<double> embedding) {
    QaPair pair;
    pair.question = std::move(question);
    pair.answer = "answer";
    pair.profile_id = "p";
    pair.embedding = std::move(embedding);
    return pair;
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

}  // namespace

TEST_CASE("parse_node_block reads the two-domain example block") {
    const auto entries = synthesis::parse_node_block(kDomainExampleBlock, "Domain");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].short_name == "Mathematics");
    CHECK(entries[1].short_name == "Creative Writing");
    CHECK(entries[1].example == "Write a short story about a robot who learns to paint.");
}

TEST_CASE("parse_node_block rejects empty and malformed blocks") {
    CHECK_THROWS_AS(synthesis::parse_node_block("<node begin>\n</node end>", "Domain"),
                    ParseError);
    CHECK_THROWS_AS(synthesis::parse_node_block("no markers at all", "Domain"), ParseError);
    CHECK_THROWS_AS(
        synthesis::parse_node_block("<node begin>\nDefinition: orphan\n</node end>", "Domain"),
        ParseError);
}

TEST_CASE("parse_node_block round-trips blocks written by an independent writer") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> count(1, 5);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = count(rng);
        std::vector<NodeEntry> expected;
        // independent writer: plain string assembly, no format_node_set
        std::string block = "preamble text\n<node begin>\n";
        for (int i = 0; i < n; ++i) {
            NodeEntry e{"Name" + std::to_string(i), "Definition " + std::to_string(i) + ".",
                        "Example " + std::to_string(i) + "?"};
            block += "Level: " + e.short_name + "\nDefinition: " + e.definition +
                     "\nExample: " + e.example + "\n\n";
            expected.push_back(std::move(e));
        }
        block += "</node end>\ntrailing chatter";
        const auto parsed = synthesis::parse_node_block(block, "Level");
        REQUIRE(parsed.size() == expected.size());
        for (int i = 0; i < n; ++i) CHECK(parsed[static_cast<std::size_t>(i)] == expected[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("generate_children parses, retries, and truncates to the cap") {
    SUBCASE("domain example block yields two domains") {
        gen::ScriptedClient client({kDomainExampleBlock});
        const auto result =
            synthesis::generate_children(taxonomy::Level::Domain, nullptr, nullptr, client);
        CHECK(result.entries.size() == 2);
        CHECK(result.warnings.empty());
    }
    SUBCASE("empty block raises a parse error after retries") {
        gen::ScriptedClient client({"<node begin>\n</node end>"});
        CHECK_THROWS_AS(
            synthesis::generate_children(taxonomy::Level::Domain, nullptr, nullptr, client),
            ParseError);
        CHECK(client.calls() == 4);  // initial try plus three retries
    }
    SUBCASE("a bad response is retried until a good one arrives") {
        gen::ScriptedClient client({"garbage", kDomainExampleBlock});
        const auto result =
            synthesis::generate_children(taxonomy::Level::Domain, nullptr, nullptr, client);
        CHECK(result.entries.size() == 2);
        CHECK(client.calls() == 2);
    }
    SUBCASE("over-cap responses are truncated with a warning") {
        std::string block = "<node begin>\n";
        for (int i = 0; i < 7; ++i)
            block += "Domain: D" + std::to_string(i) + "\nDefinition: d.\nExample: e.\n\n";
        block += "</node end>";
        gen::ScriptedClient client({block});
        const auto result =
            synthesis::generate_children(taxonomy::Level::Domain, nullptr, nullptr, client);
        CHECK(result.entries.size() == 4);  // domain generation cap
        CHECK(result.warnings.size() == 1);
    }
}

TEST_CASE("refine_node_set terminates after three consecutive no-change rounds") {
    synthesis::CandidateNodeSet candidates;
    candidates.level = taxonomy::Level::Domain;
    candidates.entries = {{"Alpha", "First domain.", "a?"}, {"Beta", "Second domain.", "b?"}};

    // Revision proposes something else every round, but the evaluator always
    // keeps Set A, so the current set never changes.
    int call = 0;
    CallbackClient client([&](const std::string&) {
        return (call++ % 2 == 0)
                   ? revision_block({{"Gamma", "Other.", "g?"}}, "Domain")
                   : prefer("Set A");
    });
    const auto result = synthesis::refine_node_set(candidates, client);
    CHECK(result.converged);
    CHECK(result.rounds == 3);
    CHECK(result.set.entries.size() == 2);
}

TEST_CASE("refine_node_set adopts a preferred revision then stabilizes") {
    synthesis::CandidateNodeSet candidates;
    candidates.level = taxonomy::Level::Domain;
    candidates.entries = {{"Alpha", "First domain.", "a?"}};

    const std::vector<NodeEntry> revised{{"Gamma", "Adopted domain.", "g?"}};
    int round = 0;
    int call = 0;
    CallbackClient client([&](const std::string&) {
        if (call++ % 2 == 0) return revision_block(revised, "Domain");
        ++round;
        return prefer(round == 1 ? "Set B" : "Set A");
    });
    const auto result = synthesis::refine_node_set(candidates, client);
    CHECK(result.converged);
    CHECK(result.rounds == 4);  // one adoption round plus three stable rounds
    REQUIRE(result.set.entries.size() == 1);
    CHECK(result.set.entries[0].short_name == "Gamma");
}

TEST_CASE("refine_node_set hits the round cap under forced non-convergence") {
    synthesis::CandidateNodeSet candidates;
    candidates.level = taxonomy::Level::Domain;
    candidates.entries = {{"Alpha", "First domain.", "a?"}};

    // Every revision is brand new; the evaluator alternates B (adopt) and A.
    int call = 0;
    int blocks = 0;
    int choices = 0;
    CallbackClient client([&](const std::string&) {
        if (call++ % 2 == 0)
            return revision_block({{"Fresh" + std::to_string(blocks++), "New.", "n?"}}, "Domain");
        return prefer(choices++ % 2 == 0 ? "Set B" : "Set A");
    });
    const auto result = synthesis::refine_node_set(candidates, client);
    CHECK_FALSE(result.converged);
    CHECK(result.rounds == 20);
    REQUIRE_FALSE(result.set.warnings.empty());
    CHECK(result.set.warnings.back().find("unconverged") != std::string::npos);
}

TEST_CASE("refine_node_set never returns more entries than the level cap") {
    synthesis::CandidateNodeSet candidates;
    candidates.level = taxonomy::Level::Difficulty;
    candidates.entries = {{"Easy", "e.", "q?"}, {"Hard", "h.", "q?"}};

    std::vector<NodeEntry> oversized;
    for (int i = 0; i < 8; ++i)
        oversized.push_back({"L" + std::to_string(i), "d.", "q?"});
    int call = 0;
    CallbackClient client([&](const std::string&) {
        return (call++ % 2 == 0) ? revision_block(oversized, "Level") : prefer("Set B");
    });
    const auto result = synthesis::refine_node_set(candidates, client);
    CHECK(result.set.entries.size() <= 5);
}

TEST_CASE("refine_node_set raises a parse error when the choice marker is missing") {
    synthesis::CandidateNodeSet candidates;
    candidates.level = taxonomy::Level::Domain;
    candidates.entries = {{"Alpha", "First domain.", "a?"}};
    int call = 0;
    CallbackClient client([&](const std::string&) {
        return (call++ % 2 == 0) ? revision_block({{"Gamma", "Other.", "g?"}}, "Domain")
                                 : std::string("I prefer the second set.");
    });
    CHECK_THROWS_AS(synthesis::refine_node_set(candidates, client), ParseError);
}

TEST_CASE("generate_qa_batch parses the three-pair example block") {
    gen::ScriptedClient client({kQaExampleBlock});
    const auto result = synthesis::generate_qa_batch(toy_profile(), 8, client);
    REQUIRE(result.pairs.size() == 3);
    CHECK(result.pairs[0].question == "What is 2+2?");
    CHECK(result.pairs[0].answer == "2+2 equals 4");
    CHECK(result.pairs[2].answer ==
          "Photosynthesis is the process by which plants convert sunlight into energy.");
    for (const auto& pair : result.pairs) CHECK(pair.profile_id == toy_profile().profile_id);
}

TEST_CASE("generate_qa_batch handles degenerate responses") {
    SUBCASE("markers with zero pairs give an empty list") {
        gen::ScriptedClient client({"<qa_pairs begin>\n</qa_pairs end>"});
        CHECK(synthesis::generate_qa_batch(toy_profile(), 8, client).pairs.empty());
    }
    SUBCASE("missing markers raise a parse error") {
        gen::ScriptedClient client({"Q: a\nA: b"});
        CHECK_THROWS_AS(synthesis::generate_qa_batch(toy_profile(), 8, client), ParseError);
    }
    SUBCASE("pairs with an empty side are dropped with a warning") {
        gen::ScriptedClient client({"<qa_pairs begin>\nQ: only a question\nA:\n\nQ: ok\nA: fine\n"
                                    "</qa_pairs end>"});
        const auto result = synthesis::generate_qa_batch(toy_profile(), 8, client);
        CHECK(result.pairs.size() == 1);
        CHECK(result.warnings.size() == 1);
    }
}

TEST_CASE("generate_qa_batch round-trips blocks from an independent writer") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> count(1, 8);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = count(rng);
        std::string block = "<qa_pairs begin>\n";
        for (int i = 0; i < k; ++i)
            block += "Q: question " + std::to_string(i) + "?\nA: answer " + std::to_string(i) +
                     ".\n\n";
        block += "</qa_pairs end>";
        gen::ScriptedClient client({block});
        CHECK(synthesis::generate_qa_batch(toy_profile(), k, client).pairs.size() ==
              static_cast<std::size_t>(k));
    }
}

TEST_CASE("dedup_filter rejects self-similar pairs and keeps orthogonal ones") {
    const auto a = pair_with_embedding("a", {1.0, 0.0});
    const auto a_copy = pair_with_embedding("copy of a", {1.0, 0.0});
    const auto b = pair_with_embedding("b", {0.0, 1.0});

    const auto accepted = synthesis::dedup_filter({a, a_copy, b}, {}, 0.9);
    REQUIRE(accepted.size() == 2);
    CHECK(accepted[0].question == "a");
    CHECK(accepted[1].question == "b");

    // an exact duplicate of something already kept is rejected too
    CHECK(synthesis::dedup_filter({a_copy}, {a}, 0.9).empty());
}

TEST_CASE("dedup_filter rejects dimension mismatches") {
    const auto a = pair_with_embedding("a", {1.0, 0.0});
    const auto bad = pair_with_embedding("bad", {1.0, 0.0, 0.0});
    CHECK_THROWS_AS(synthesis::dedup_filter({bad}, {a}, 0.9), RouterError);
}

TEST_CASE("dedup_filter matches a brute-force similarity oracle on planted duplicates") {
    std::mt19937_64 rng(12345);
    const std::size_t dim = 48;
    std::vector<QaPair> fresh;
    for (int i = 0; i < 45; ++i)
        fresh.push_back(pair_with_embedding("base " + std::to_string(i), random_unit(rng, dim)));

    // plant 5 near-duplicates of existing pairs (cosine >= 0.95 by construction)
    std::uniform_int_distribution<int> pick(0, 44);
    for (int i = 0; i < 5; ++i) {
        auto vec = fresh[static_cast<std::size_t>(pick(rng))].embedding;
        for (auto& v : vec) v += 0.01 * (rng() % 100) / 100.0;
        double norm = 0.0;
        for (double v : vec) norm += v * v;
        norm = std::sqrt(norm);
        for (auto& v : vec) v /= norm;
        fresh.push_back(pair_with_embedding("dupe " + std::to_string(i), std::move(vec)));
    }

    // brute-force oracle: greedy acceptance from the full similarity matrix
    std::vector<bool> accepted_oracle(fresh.size(), false);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        double max_sim = -1.0;
        for (std::size_t j = 0; j < i; ++j)
            if (accepted_oracle[j])
                max_sim = std::max(max_sim, embedding::cosine_similarity(fresh[i].embedding,
                                                                         fresh[j].embedding));
        accepted_oracle[i] = max_sim <= 0.9;
    }
    const auto expected =
        static_cast<std::size_t>(std::count(accepted_oracle.begin(), accepted_oracle.end(), true));
    REQUIRE(expected == 45);  // all originals distinct, all plants filtered

    const auto accepted = synthesis::dedup_filter(fresh, {}, 0.9);
    CHECK(accepted.size() == expected);

    // post-hoc invariant: no two accepted pairs exceed the threshold
    for (std::size_t i = 0; i < accepted.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            CHECK(embedding::cosine_similarity(accepted[i].embedding, accepted[j].embedding) <=
                  0.9);
}

namespace {

/// Client that emits batches of globally unique QA pairs.
std::string unique_qa_block(int batch, int start) {
    std::string block = "<qa_pairs begin>\n";
    for (int i = 0; i < batch; ++i)
        block += "Q: unique question " + std::to_string(start + i) + "?\nA: unique answer " +
                 std::to_string(start + i) + ".\n\n";
    block += "</qa_pairs end>";
    return block;
}

}  // namespace

TEST_CASE("synthesize_profile reaches the target with a unique-pair mock") {
    int next = 0;
    CallbackClient client([&](const std::string&) {
        const auto block = unique_qa_block(8, next);
        next += 8;
        return block;
    });
    embedding::HashProjectionEmbedder embedder(64, 9);
    const auto result = synthesis::synthesize_profile(toy_profile(), client, embedder);
    CHECK(result.pairs.size() == 40);
    CHECK(result.batches == 5);
    CHECK(result.target_reached);
}

TEST_CASE("synthesize_profile stops at the batch cap when the mock repeats itself") {
    gen::ScriptedClient client({"<qa_pairs begin>\nQ: same question?\nA: same answer.\n"
                                "</qa_pairs end>"});
    embedding::HashProjectionEmbedder embedder(64, 9);
    const auto result = synthesis::synthesize_profile(toy_profile(), client, embedder);
    CHECK(result.pairs.size() == 1);
    CHECK(result.batches == 15);
    CHECK_FALSE(result.target_reached);
}

TEST_CASE("synthesize_profile matches a hand simulation on a mixed mock") {
    // batches alternate: 8 new pairs, then a full repeat of the previous batch
    int next = 0;
    int call = 0;
    std::string last_block = unique_qa_block(8, 0);
    CallbackClient client([&](const std::string&) {
        if (call++ % 2 == 0) {
            last_block = unique_qa_block(8, next);
            next += 8;
            return last_block;
        }
        return last_block;
    });
    embedding::HashProjectionEmbedder embedder(64, 9);
    const auto result = synthesis::synthesize_profile(toy_profile(), client, embedder);
    // hand simulation: +8, +0, +8, +0, ... target 40 reached on batch 9
    CHECK(result.pairs.size() == 40);
    CHECK(result.batches == 9);
}

TEST_CASE("build_dataset synthesizes every profile of a toy taxonomy") {
    int next = 0;
    CallbackClient client([&](const std::string&) {
        const auto block = unique_qa_block(8, next);
        next += 8;
        return block;
    });
    embedding::HashProjectionEmbedder embedder(64, 9);
    const auto taxonomy = testsupport::toy_taxonomy();
    const auto dataset = synthesis::build_dataset(taxonomy, client, embedder);
    CHECK(dataset.pairs.size() == 120);  // 3 profiles x 40

    // recount per profile
    std::map<std::string, int> per_profile;
    for (const auto& pair : dataset.pairs) per_profile[pair.profile_id]++;
    CHECK(per_profile.size() == 3);
    for (const auto& [id, count] : per_profile) CHECK(count == 40);

    CHECK(dataset.synthesis_usage.input_tokens == 10u * static_cast<unsigned>(client.calls()));
}

TEST_CASE("qa datasets round-trip through the line-delimited format") {
    testsupport::TempDir dir("dataset");
    synthesis::QaDataset dataset;
    dataset.pairs.push_back({"q one?", "a one.", "profile-1", {}});
    dataset.pairs.push_back({"q two?", "a \"quoted\" two.", "profile-2", {}});
    dataset.save(dir.file("data.jsonl"));
    const auto loaded = synthesis::QaDataset::load(dir.file("data.jsonl"));
    REQUIRE(loaded.pairs.size() == 2);
    CHECK(loaded.pairs[1].answer == "a \"quoted\" two.");
    CHECK(loaded.pairs[1].profile_id == "profile-2");
}

TEST_CASE("expand_taxonomy grows seeds into a valid three-level tree") {
    auto seeds = std::vector<taxonomy::TaskNode>{};
    taxonomy::TaskNode seed;
    seed.level = taxonomy::Level::Domain;
    seed.short_name = "Mathematics";
    seed.definition = "Quantitative problem solving.";
    seed.example = "What is 2+2?";
    seeds.push_back(seed);

    CallbackClient client([&](const std::string& prompt) -> std::string {
        if (prompt.find("**Step 1: Generate Domain Nodes**") != std::string::npos)
            return "<node begin>\nDomain: Scientific Reasoning\nDefinition: Applying scientific "
                   "methods.\nExample: Why does ice float?\n</node end>";
        if (prompt.find("Step 3: Define Difficulty Levels") != std::string::npos)
            return "<node begin>\nLevel: Easy\nDefinition: Simple cases.\nExample: easy?\n\n"
                   "Level: Hard\nDefinition: Involved cases.\nExample: hard?\n</node end>";
        if (prompt.find("**Step 2: Generate Subcategories") != std::string::npos)
            return "<node begin>\nSubcategory: Core\nDefinition: Central tasks.\nExample: c?\n\n"
                   "Subcategory: Applied\nDefinition: Applied tasks.\nExample: a?\n</node end>";
        if (prompt.find("<revision node begin>") != std::string::npos) {
            // echo the current candidate set back as the "revision"
            const std::string begin_tag = "Current Candidate ";
            const auto begin = prompt.find(begin_tag);
            const auto set_start = prompt.find("\n\n", begin) + 2;
            const auto set_end = prompt.find("\n\n**Node Generation Rules:**", set_start);
            return "<revision node begin>\n" + prompt.substr(set_start, set_end - set_start) +
                   "\n</revision node end>";
        }
        return prefer("Set A");
    });

    const auto taxonomy = synthesis::expand_taxonomy(seeds, client);
    CHECK(taxonomy.domains().size() == 2);  // seed + one generated
    CHECK(taxonomy.difficulty_count() == 2u * 2u * 2u);
    for (const auto& domain : taxonomy.domains()) {
        CHECK(domain.children.size() == 2);
        for (const auto& subcat : domain.children) CHECK(subcat.children.size() == 2);
    }
}
