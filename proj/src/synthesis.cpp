#include "trouter/synthesis.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

namespace trouter::synthesis {

using nlohmann::json;
using prompts::NodeEntry;
using taxonomy::Level;

namespace {

int generation_cap(Level level) {
    switch (level) {
        case Level::Domain: return prompts::kMaxNewDomainNodes;
        case Level::Subcategory: return prompts::kMaxSubcategoryNodes;
        case Level::Difficulty: return prompts::kMaxDifficultyLevelNodes;
    }
    return 0;
}

std::string_view refine_node_name(Level level) {
    switch (level) {
        case Level::Domain: return "Domain";
        case Level::Subcategory: return "Subcategory";
        case Level::Difficulty: return "Difficulty Level";
    }
    return "unknown";
}

std::string rules_for(Level level) {
    std::string rules;
    switch (level) {
        case Level::Domain:
            rules = std::string(prompts::templates::kDomainNodeRule);
            return replace_all(std::move(rules), "{max_new_domain_nodes}",
                               std::to_string(prompts::kMaxNewDomainNodes));
        case Level::Subcategory:
            rules = std::string(prompts::templates::kSubcategoryNodeRule);
            return replace_all(std::move(rules), "{max_subcategory_nodes}",
                               std::to_string(prompts::kMaxSubcategoryNodes));
        case Level::Difficulty:
            rules = std::string(prompts::templates::kDifficultyLevelNodeRule);
            return replace_all(std::move(rules), "{max_difficulty_level_nodes}",
                               std::to_string(prompts::kMaxDifficultyLevelNodes));
    }
    return rules;
}

/// Runs `attempt` up to 1 + max_retries times, retrying only on ParseError.
template <typename Fn>
auto with_retries(const GenOptions& options, Fn&& attempt) {
    int tries = 0;
    for (;;) {
        try {
            return attempt();
        } catch (const ParseError&) {
            if (++tries > options.max_retries) throw;
        }
    }
}

}  // namespace

std::vector<NodeEntry> parse_node_block(const std::string& text, std::string_view label,
                                        std::string_view begin_marker,
                                        std::string_view end_marker) {
    const std::size_t begin = text.find(begin_marker);
    if (begin == std::string::npos)
        throw ParseError("response lacks '" + std::string(begin_marker) + "' marker");
    const std::size_t body_start = begin + begin_marker.size();
    const std::size_t end = text.find(end_marker, body_start);
    if (end == std::string::npos)
        throw ParseError("response lacks '" + std::string(end_marker) + "' marker");

    const std::string label_prefix = std::string(label) + ":";
    std::vector<NodeEntry> entries;
    NodeEntry current;
    bool open = false;
    for (const auto& raw : split_lines(text.substr(body_start, end - body_start))) {
        const std::string line = trim(raw);
        if (line.empty() || line == "...") continue;
        if (starts_with(line, label_prefix)) {
            if (open) entries.push_back(std::move(current));
            current = NodeEntry{};
            current.short_name = trim(line.substr(label_prefix.size()));
            open = true;
        } else if (starts_with(line, "Definition:")) {
            if (!open) throw ParseError("Definition before any " + std::string(label) + " line");
            current.definition = trim(line.substr(11));
        } else if (starts_with(line, "Example:")) {
            if (!open) throw ParseError("Example before any " + std::string(label) + " line");
            current.example = trim(line.substr(8));
        } else {
            throw ParseError("unexpected line in node block: " + line);
        }
    }
    if (open) entries.push_back(std::move(current));
    if (entries.empty()) throw ParseError("node block contains no entries");
    for (const auto& e : entries)
        if (e.short_name.empty() || e.definition.empty())
            throw ParseError("node entry missing name or definition");
    return entries;
}

CandidateNodeSet generate_children(Level level, const taxonomy::TaskNode* domain,
                                   const taxonomy::TaskNode* subcategory, gen::GenClient& client,
                                   const GenOptions& options) {
    std::string prompt;
    std::string parent_path;
    switch (level) {
        case Level::Domain:
            prompt = prompts::render_domain_prompt();
            break;
        case Level::Subcategory:
            if (!domain) throw RouterError("subcategory generation needs a domain parent");
            parent_path = domain->short_name;
            prompt = prompts::render_subcategory_prompt(domain->short_name, domain->definition,
                                                        domain->example);
            break;
        case Level::Difficulty:
            if (!domain || !subcategory)
                throw RouterError("difficulty generation needs domain and subcategory parents");
            parent_path = domain->short_name + "/" + subcategory->short_name;
            prompt = prompts::render_difficulty_prompt(domain->short_name, subcategory->short_name,
                                                       subcategory->definition,
                                                       subcategory->example);
            break;
    }

    CandidateNodeSet result;
    result.level = level;
    result.parent_path = parent_path;

    catalog::UsageRecord usage;
    result.entries = with_retries(options, [&] {
        auto completion = client.complete("", prompt);
        usage += completion.usage;
        return parse_node_block(completion.text, taxonomy::level_label(level));
    });
    result.usage = usage;

    const int cap = generation_cap(level);
    if (static_cast<int>(result.entries.size()) > cap) {
        result.warnings.push_back("generator proposed " + std::to_string(result.entries.size()) +
                                  " nodes under '" + parent_path + "', truncated to " +
                                  std::to_string(cap));
        result.entries.resize(static_cast<std::size_t>(cap));
    }
    return result;
}

namespace {

std::vector<std::pair<std::string, std::string>> canonical_form(
    const std::vector<NodeEntry>& entries) {
    std::vector<std::pair<std::string, std::string>> form;
    form.reserve(entries.size());
    for (const auto& e : entries) form.emplace_back(e.short_name, e.definition);
    std::sort(form.begin(), form.end());
    return form;
}

enum class Preferred { SetA, SetB };

Preferred parse_preferred(const std::string& text) {
    const std::string_view begin_marker = "<preferred set>";
    const std::string_view end_marker = "</preferred set>";
    const std::size_t begin = text.find(begin_marker);
    if (begin == std::string::npos) throw ParseError("response lacks '<preferred set>' marker");
    std::size_t end = text.find(end_marker, begin);
    if (end == std::string::npos) end = text.size();
    const std::string inner = trim(text.substr(begin + begin_marker.size(),
                                               end - begin - begin_marker.size()));
    const bool has_a = inner.find("Set A") != std::string::npos;
    const bool has_b = inner.find("Set B") != std::string::npos;
    if (has_a == has_b) throw ParseError("preferred-set marker does not name exactly one set");
    return has_a ? Preferred::SetA : Preferred::SetB;
}

}  // namespace

RefineResult refine_node_set(const CandidateNodeSet& candidates, gen::GenClient& client,
                             const RefineOptions& options) {
    if (candidates.entries.empty()) throw RouterError("cannot refine an empty candidate set");

    const Level level = candidates.level;
    const std::string_view node_name = refine_node_name(level);
    const std::string_view label = taxonomy::level_label(level);
    const std::string rules = rules_for(level);
    const int cap = generation_cap(level);

    RefineResult result;
    result.set = candidates;
    result.set.warnings.clear();

    std::mt19937_64 rng(options.shuffle_seed);
    std::vector<NodeEntry> current = candidates.entries;
    int stable = 0;

    while (result.rounds < options.max_rounds) {
        std::vector<NodeEntry> shuffled = current;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const std::string current_text = prompts::format_node_set(shuffled, label);

        std::vector<NodeEntry> revised = with_retries(options.gen, [&] {
            auto completion = client.complete(
                "", prompts::render_node_revise_prompt(node_name, label, rules, current_text));
            result.set.usage += completion.usage;
            return parse_node_block(completion.text, label, "<revision node begin>",
                                    "</revision node end>");
        });
        if (static_cast<int>(revised.size()) > cap) {
            result.set.warnings.push_back("revision exceeded cap, truncated to " +
                                          std::to_string(cap));
            revised.resize(static_cast<std::size_t>(cap));
        }

        const Preferred choice = with_retries(options.gen, [&] {
            auto completion = client.complete(
                "", prompts::render_node_set_choice_prompt(
                        node_name, rules, current_text, prompts::format_node_set(revised, label)));
            result.set.usage += completion.usage;
            return parse_preferred(completion.text);
        });

        ++result.rounds;
        const std::vector<NodeEntry>& preferred = choice == Preferred::SetA ? shuffled : revised;
        if (canonical_form(preferred) == canonical_form(current)) {
            ++stable;
        } else {
            current = preferred;
            stable = 0;
        }
        if (stable >= options.stability_rounds) {
            result.converged = true;
            break;
        }
    }

    if (!result.converged)
        result.set.warnings.push_back("refinement unconverged after " +
                                      std::to_string(result.rounds) + " rounds");
    result.set.entries = std::move(current);
    return result;
}

QaBatchResult generate_qa_batch(const taxonomy::TaskProfile& profile, int batch,
                                gen::GenClient& client, const GenOptions& options) {
    const std::string prompt = prompts::render_qa_prompt(profile.rendered_text, batch);

    QaBatchResult result;
    const std::string text = with_retries(options, [&] {
        auto completion = client.complete("", prompt);
        result.usage += completion.usage;
        const std::string_view begin_marker = "<qa_pairs begin>";
        if (completion.text.find(begin_marker) == std::string::npos ||
            completion.text.find("</qa_pairs end>") == std::string::npos)
            throw ParseError("response lacks qa_pairs markers");
        return completion.text;
    });

    const std::size_t begin = text.find("<qa_pairs begin>") + std::string_view("<qa_pairs begin>").size();
    const std::size_t end = text.find("</qa_pairs end>", begin);

    std::string question;
    std::string answer;
    bool in_answer = false;
    bool open = false;
    auto commit = [&] {
        if (!open) return;
        QaPair pair;
        pair.question = trim(question);
        pair.answer = trim(answer);
        pair.profile_id = profile.profile_id;
        if (pair.question.empty() || pair.answer.empty()) {
            result.warnings.push_back("dropped pair with empty question or answer");
        } else {
            result.pairs.push_back(std::move(pair));
        }
        question.clear();
        answer.clear();
        in_answer = false;
        open = false;
    };

    for (const auto& raw : split_lines(text.substr(begin, end - begin))) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (starts_with(line, "Q:")) {
            commit();
            question = trim(line.substr(2));
            in_answer = false;
            open = true;
        } else if (starts_with(line, "A:")) {
            answer = trim(line.substr(2));
            in_answer = true;
        } else if (open) {
            // continuation of a multi-line question or answer
            (in_answer ? answer : question) += "\n" + line;
        }
    }
    commit();
    return result;
}

std::vector<QaPair> dedup_filter(const std::vector<QaPair>& fresh, const std::vector<QaPair>& kept,
                                 double threshold) {
    std::size_t dim = 0;
    if (!kept.empty())
        dim = kept.front().embedding.size();
    else if (!fresh.empty())
        dim = fresh.front().embedding.size();
    for (const auto& p : kept)
        if (p.embedding.size() != dim) throw RouterError("embedding dimension mismatch in dedup");
    for (const auto& p : fresh)
        if (p.embedding.size() != dim) throw RouterError("embedding dimension mismatch in dedup");

    std::vector<QaPair> accepted;
    for (const auto& pair : fresh) {
        double max_sim = -1.0;
        for (const auto& other : kept)
            max_sim = std::max(max_sim, embedding::cosine_similarity(pair.embedding, other.embedding));
        for (const auto& other : accepted)
            max_sim = std::max(max_sim, embedding::cosine_similarity(pair.embedding, other.embedding));
        if (max_sim <= threshold) accepted.push_back(pair);
    }
    return accepted;
}

ProfileSynthesis synthesize_profile(const taxonomy::TaskProfile& profile, gen::GenClient& client,
                                    embedding::EmbeddingProvider& embedder,
                                    const SynthesisOptions& options) {
    if (options.target < 1) throw RouterError("synthesis target must be at least 1");

    ProfileSynthesis result;
    while (static_cast<int>(result.pairs.size()) < options.target &&
           result.batches < options.max_batches) {
        QaBatchResult batch = generate_qa_batch(profile, options.batch, client, options.gen);
        ++result.batches;
        result.usage += batch.usage;
        for (auto& w : batch.warnings) result.warnings.push_back(std::move(w));
        for (auto& pair : batch.pairs)
            pair.embedding = embedder.embed(pair.question + "\n" + pair.answer);
        auto accepted = dedup_filter(batch.pairs, result.pairs, options.dedup_threshold);
        for (auto& pair : accepted) result.pairs.push_back(std::move(pair));
    }
    if (static_cast<int>(result.pairs.size()) > options.target)
        result.pairs.resize(static_cast<std::size_t>(options.target));
    result.target_reached = static_cast<int>(result.pairs.size()) >= options.target;
    return result;
}

QaDataset build_dataset(const taxonomy::Taxonomy& taxonomy, gen::GenClient& client,
                        embedding::EmbeddingProvider& embedder, const SynthesisOptions& options) {
    QaDataset dataset;
    for (const auto& profile : taxonomy.flatten_difficulty()) {
        ProfileSynthesis synthesis = synthesize_profile(profile, client, embedder, options);
        dataset.synthesis_usage += synthesis.usage;
        for (auto& pair : synthesis.pairs) dataset.pairs.push_back(std::move(pair));
    }
    if (options.engine_pricing)
        dataset.synthesis_cost =
            catalog::compute_cost(*options.engine_pricing, dataset.synthesis_usage);
    return dataset;
}

void QaDataset::save(const std::string& path) const {
    std::string out;
    for (const auto& pair : pairs) {
        json line;
        line["profile_id"] = pair.profile_id;
        line["question"] = pair.question;
        line["answer"] = pair.answer;
        out += line.dump() + "\n";
    }
    write_text_file(path, out);
}

QaDataset QaDataset::load(const std::string& path) {
    QaDataset dataset;
    for (const auto& line : split_lines(read_text_file(path))) {
        if (trim(line).empty()) continue;
        json doc = json::parse(line);
        QaPair pair;
        pair.profile_id = doc.at("profile_id").get<std::string>();
        pair.question = doc.at("question").get<std::string>();
        pair.answer = doc.at("answer").get<std::string>();
        dataset.pairs.push_back(std::move(pair));
    }
    return dataset;
}

namespace {

taxonomy::TaskNode to_node(const NodeEntry& entry, Level level) {
    taxonomy::TaskNode node;
    node.level = level;
    node.short_name = entry.short_name;
    node.definition = entry.definition;
    node.example = entry.example;
    return node;
}

RefineOptions seeded_refine(const ExpandOptions& options, const std::string& path) {
    RefineOptions refine = options.refine;
    refine.shuffle_seed ^= fnv1a64(path);
    return refine;
}

}  // namespace

taxonomy::Taxonomy expand_taxonomy(const std::vector<taxonomy::TaskNode>& seed_domains,
                                   gen::GenClient& client, const ExpandOptions& options) {
    std::vector<taxonomy::TaskNode> domains = seed_domains;

    auto new_domains = generate_children(Level::Domain, nullptr, nullptr, client, options.gen);
    auto refined_domains = refine_node_set(new_domains, client, seeded_refine(options, "<root>"));
    for (const auto& entry : refined_domains.set.entries)
        domains.push_back(to_node(entry, Level::Domain));

    for (auto& domain : domains) {
        auto subcats =
            generate_children(Level::Subcategory, &domain, nullptr, client, options.gen);
        auto refined =
            refine_node_set(subcats, client, seeded_refine(options, domain.short_name));
        for (const auto& entry : refined.set.entries)
            domain.children.push_back(to_node(entry, Level::Subcategory));

        for (auto& subcat : domain.children) {
            auto difficulties =
                generate_children(Level::Difficulty, &domain, &subcat, client, options.gen);
            auto refined_diff = refine_node_set(
                difficulties, client,
                seeded_refine(options, domain.short_name + "/" + subcat.short_name));
            for (const auto& entry : refined_diff.set.entries)
                subcat.children.push_back(to_node(entry, Level::Difficulty));
        }
    }

    return taxonomy::Taxonomy(std::move(domains));
}

}  // namespace trouter::synthesis
