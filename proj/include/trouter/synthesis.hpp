#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/embedding.hpp"
#include "trouter/genclient.hpp"
#include "trouter/prompts.hpp"
#include "trouter/taxonomy.hpp"

namespace trouter::synthesis {

/// One synthesized question/answer bound to a task profile.
struct QaPair {
    std::string question;
    std::string answer;
    std::string profile_id;
    std::vector<double> embedding;  // filled before dedup; constant dim per dataset
};

struct CandidateNodeSet {
    taxonomy::Level level = taxonomy::Level::Domain;
    std::string parent_path;  // "" for the domain level
    std::vector<prompts::NodeEntry> entries;
    std::vector<std::string> warnings;
    catalog::UsageRecord usage;
};

struct GenOptions {
    int max_retries = 3;  // re-asks per malformed response before giving up
};

/// Parses a `<node begin>` ... `</node end>` block into entries labeled with
/// the level's label line ("Domain:", "Subcategory:", "Level:").
/// Throws ParseError when the block or any entry is malformed.
std::vector<prompts::NodeEntry> parse_node_block(const std::string& text, std::string_view label,
                                                 std::string_view begin_marker = "<node begin>",
                                                 std::string_view end_marker = "</node end>");

/// Asks the generator for child task types of `parent` (or for new domains
/// when level == Domain). Truncates to the level cap with a warning.
CandidateNodeSet generate_children(taxonomy::Level level, const taxonomy::TaskNode* domain,
                                   const taxonomy::TaskNode* subcategory, gen::GenClient& client,
                                   const GenOptions& options = {});

struct RefineOptions {
    int stability_rounds = 3;  // consecutive no-change rounds required to finish
    int max_rounds = 20;
    std::uint64_t shuffle_seed = 1;
    GenOptions gen;
};

struct RefineResult {
    CandidateNodeSet set;
    int rounds = 0;
    bool converged = false;
};

/// Self-critique loop: shuffle, ask for a revision, then ask the evaluator to
/// choose between the current set (Set A) and the revision (Set B). Stops
/// after `stability_rounds` consecutive rounds whose preferred set equals the
/// current one under order-insensitive (name, definition) comparison.
RefineResult refine_node_set(const CandidateNodeSet& candidates, gen::GenClient& client,
                             const RefineOptions& options = {});

struct QaBatchResult {
    std::vector<QaPair> pairs;
    std::vector<std::string> warnings;
    catalog::UsageRecord usage;
};

/// One generation batch for a profile; parses Q:/A: pairs between the
/// <qa_pairs begin> markers. Pairs with an empty side are dropped.
QaBatchResult generate_qa_batch(const taxonomy::TaskProfile& profile, int batch,
                                gen::GenClient& client, const GenOptions& options = {});

/// Order-dependent near-duplicate filter: a pair is accepted iff its maximum
/// cosine similarity against everything kept so far stays at or below the
/// threshold.
std::vector<QaPair> dedup_filter(const std::vector<QaPair>& fresh, const std::vector<QaPair>& kept,
                                 double threshold = 0.9);

struct SynthesisOptions {
    int target = 40;    // diverse pairs wanted per profile
    int batch = 8;      // pairs requested per generation call
    double dedup_threshold = 0.9;
    int max_batches = 15;
    GenOptions gen;
    /// Pricing of the generation engine; when set, synthesis results carry a
    /// money cost next to the token usage.
    std::optional<catalog::ModelSpec> engine_pricing;
};

struct ProfileSynthesis {
    std::vector<QaPair> pairs;
    int batches = 0;
    bool target_reached = false;
    catalog::UsageRecord usage;
    std::vector<std::string> warnings;
};

/// Batched generate-then-filter loop until `target` diverse pairs exist or
/// the batch cap is hit.
ProfileSynthesis synthesize_profile(const taxonomy::TaskProfile& profile, gen::GenClient& client,
                                    embedding::EmbeddingProvider& embedder,
                                    const SynthesisOptions& options = {});

struct QaDataset {
    std::vector<QaPair> pairs;
    catalog::UsageRecord synthesis_usage;
    double synthesis_cost = 0.0;  // priced usage; zero when no engine pricing was given

    static QaDataset load(const std::string& path);
    void save(const std::string& path) const;  // line-delimited (profile_id, question, answer)
};

/// Synthesizes every profile of the taxonomy.
QaDataset build_dataset(const taxonomy::Taxonomy& taxonomy, gen::GenClient& client,
                        embedding::EmbeddingProvider& embedder,
                        const SynthesisOptions& options = {});

struct ExpandOptions {
    RefineOptions refine;
    GenOptions gen;
};

/// Seed-to-taxonomy pipeline: expands seed domains with up to 4 generated
/// ones, then grows subcategories and difficulty levels per node, refining
/// each candidate set before it is adopted.
taxonomy::Taxonomy expand_taxonomy(const std::vector<taxonomy::TaskNode>& seed_domains,
                                   gen::GenClient& client, const ExpandOptions& options = {});

}  // namespace trouter::synthesis
