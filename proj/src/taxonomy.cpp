#include "trouter/taxonomy.hpp"

#include <set>

#include <json.hpp>

#include "trouter/prompts.hpp"

namespace trouter::taxonomy {

using nlohmann::json;

std::string_view level_name(Level level) {
    switch (level) {
        case Level::Domain: return "domain";
        case Level::Subcategory: return "subcategory";
        case Level::Difficulty: return "difficulty";
    }
    return "unknown";
}

std::string_view level_label(Level level) {
    switch (level) {
        case Level::Domain: return "Domain";
        case Level::Subcategory: return "Subcategory";
        case Level::Difficulty: return "Level";
    }
    return "unknown";
}

int level_cap(Level level) {
    switch (level) {
        case Level::Domain: return 10;
        case Level::Subcategory: return prompts::kMaxSubcategoryNodes;
        case Level::Difficulty: return prompts::kMaxDifficultyLevelNodes;
    }
    return 0;
}

std::string profile_id_for(const std::string& domain_name, const std::string& subcategory_name,
                           const std::string& difficulty_name) {
    // \x1f separators keep ("a","bc") distinct from ("ab","c").
    std::string key = domain_name;
    key += '\x1f';
    key += subcategory_name;
    key += '\x1f';
    key += difficulty_name;
    return stable_hash(key);
}

Taxonomy::Taxonomy(std::vector<TaskNode> domains) : domains_(std::move(domains)) {
    validate();
}

namespace {

void require(bool condition, const std::string& path, const std::string& what) {
    if (!condition) throw RouterError("taxonomy error at '" + path + "': " + what);
}

void check_siblings_unique(const std::vector<TaskNode>& nodes, const std::string& path) {
    std::set<std::string> names;
    for (const auto& n : nodes)
        require(names.insert(n.short_name).second, path + "/" + n.short_name,
                "duplicate sibling short_name");
}

}  // namespace

void Taxonomy::validate() const {
    require(static_cast<int>(domains_.size()) <= level_cap(Level::Domain), "<root>",
            "more than 10 domains");
    check_siblings_unique(domains_, "<root>");
    for (const auto& domain : domains_) {
        const std::string dpath = domain.short_name;
        require(domain.level == Level::Domain, dpath, "expected a domain node");
        require(!domain.short_name.empty(), dpath, "empty short_name");
        require(static_cast<int>(domain.children.size()) <= level_cap(Level::Subcategory), dpath,
                "more than 10 subcategories");
        check_siblings_unique(domain.children, dpath);
        for (const auto& subcat : domain.children) {
            const std::string spath = dpath + "/" + subcat.short_name;
            require(subcat.level == Level::Subcategory, spath, "expected a subcategory node");
            require(!subcat.short_name.empty(), spath, "empty short_name");
            require(static_cast<int>(subcat.children.size()) <= level_cap(Level::Difficulty),
                    spath, "more than 5 difficulty levels");
            check_siblings_unique(subcat.children, spath);
            for (const auto& diff : subcat.children) {
                const std::string fpath = spath + "/" + diff.short_name;
                require(diff.level == Level::Difficulty, fpath, "expected a difficulty node");
                require(!diff.short_name.empty(), fpath, "empty short_name");
                require(diff.children.empty(), fpath, "difficulty nodes must be leaves");
            }
        }
    }
}

TaskProfile make_profile(const TaskNode& domain, const TaskNode& subcategory,
                         const TaskNode& difficulty) {
    TaskProfile profile;
    profile.domain_name = domain.short_name;
    profile.domain_definition = domain.definition;
    profile.subcategory_name = subcategory.short_name;
    profile.subcategory_definition = subcategory.definition;
    profile.difficulty_name = difficulty.short_name;
    profile.difficulty_definition = difficulty.definition;
    profile.profile_id =
        profile_id_for(domain.short_name, subcategory.short_name, difficulty.short_name);
    profile.rendered_text = prompts::render_difficulty_profile(
        profile.domain_name, profile.domain_definition, profile.subcategory_name,
        profile.subcategory_definition, profile.difficulty_name, profile.difficulty_definition);
    return profile;
}

std::vector<TaskProfile> Taxonomy::flatten_difficulty() const {
    std::vector<TaskProfile> profiles;
    for (const auto& domain : domains_)
        for (const auto& subcat : domain.children)
            for (const auto& diff : subcat.children)
                profiles.push_back(make_profile(domain, subcat, diff));
    return profiles;
}

std::size_t Taxonomy::difficulty_count() const {
    std::size_t count = 0;
    for (const auto& domain : domains_)
        for (const auto& subcat : domain.children) count += subcat.children.size();
    return count;
}

TaskProfile render_profile(const Taxonomy& taxonomy, const std::string& domain_name,
                           const std::string& subcategory_name,
                           const std::string& difficulty_name) {
    for (const auto& domain : taxonomy.domains()) {
        if (domain.short_name != domain_name) continue;
        for (const auto& subcat : domain.children) {
            if (subcat.short_name != subcategory_name) continue;
            for (const auto& diff : subcat.children) {
                if (diff.short_name == difficulty_name)
                    return make_profile(domain, subcat, diff);
            }
            throw RouterError("no difficulty '" + difficulty_name + "' under " + domain_name +
                              "/" + subcategory_name);
        }
        throw RouterError("no subcategory '" + subcategory_name + "' under " + domain_name);
    }
    throw RouterError("no domain '" + domain_name + "'");
}

namespace {

json node_to_json(const TaskNode& node) {
    json out;
    out["name"] = node.short_name;
    out["definition"] = node.definition;
    out["example"] = node.example;
    if (node.level != Level::Difficulty) {
        json children = json::array();
        for (const auto& child : node.children) children.push_back(node_to_json(child));
        out[node.level == Level::Domain ? "subcategories" : "difficulties"] = std::move(children);
    }
    return out;
}

TaskNode node_from_json(const json& doc, Level level) {
    TaskNode node;
    node.level = level;
    node.short_name = doc.at("name").get<std::string>();
    node.definition = doc.value("definition", std::string{});
    node.example = doc.value("example", std::string{});
    if (level == Level::Domain) {
        for (const auto& child : doc.value("subcategories", json::array()))
            node.children.push_back(node_from_json(child, Level::Subcategory));
    } else if (level == Level::Subcategory) {
        for (const auto& child : doc.value("difficulties", json::array()))
            node.children.push_back(node_from_json(child, Level::Difficulty));
    }
    return node;
}

}  // namespace

std::string Taxonomy::to_json_text() const {
    json doc;
    doc["domains"] = json::array();
    for (const auto& domain : domains_) doc["domains"].push_back(node_to_json(domain));
    return doc.dump(2) + "\n";
}

Taxonomy Taxonomy::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    std::vector<TaskNode> domains;
    for (const auto& entry : doc.at("domains"))
        domains.push_back(node_from_json(entry, Level::Domain));
    return Taxonomy(std::move(domains));
}

std::string Taxonomy::stable_hash() const { return trouter::stable_hash(to_json_text()); }

Taxonomy Taxonomy::load(const std::string& path) {
    return from_json_text(read_text_file(path));
}

void Taxonomy::save(const std::string& path) const { write_text_file(path, to_json_text()); }

}  // namespace trouter::taxonomy
