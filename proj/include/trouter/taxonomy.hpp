#pragma once

#include <string>
#include <vector>

#include "trouter/common.hpp"

namespace trouter::taxonomy {

enum class Level { Domain, Subcategory, Difficulty };

std::string_view level_name(Level level);
/// Entry label used inside <node begin> blocks: "Domain", "Subcategory", "Level".
std::string_view level_label(Level level);
/// Sibling cap for nodes generated under one parent.
int level_cap(Level level);

/// One node of the three-level task taxonomy.
struct TaskNode {
    Level level = Level::Domain;
    std::string short_name;
    std::string definition;
    std::string example;
    std::vector<TaskNode> children;
};

/// A difficulty leaf flattened together with its ancestors; the unit the
/// router treats as one task type and the generator conditions QA pairs on.
struct TaskProfile {
    std::string profile_id;
    std::string domain_name;
    std::string domain_definition;
    std::string subcategory_name;
    std::string subcategory_definition;
    std::string difficulty_name;
    std::string difficulty_definition;
    std::string rendered_text;
};

/// Stable id for a (domain, subcategory, difficulty) path. Hash-based so task
/// labels keyed on it survive re-serialization.
std::string profile_id_for(const std::string& domain_name, const std::string& subcategory_name,
                           const std::string& difficulty_name);

class Taxonomy {
public:
    Taxonomy() = default;
    explicit Taxonomy(std::vector<TaskNode> domains);

    const std::vector<TaskNode>& domains() const { return domains_; }

    /// Depth-first flattening of difficulty leaves, sibling order preserved.
    /// The position of a profile in this list is the task index used for
    /// one-hot labels, so the order must be reproducible.
    std::vector<TaskProfile> flatten_difficulty() const;

    std::size_t difficulty_count() const;

    /// Structural caps: at most 10 domains, 10 subcategories per domain,
    /// 5 difficulty levels per subcategory; exact depth 3; unique sibling
    /// names. Violations name the offending node path.
    void validate() const;

    /// Hash over the canonical serialization; snapshots bind to this so a
    /// router cannot be served against a different taxonomy.
    std::string stable_hash() const;

    static Taxonomy load(const std::string& path);
    void save(const std::string& path) const;

    static Taxonomy from_json_text(const std::string& text);
    std::string to_json_text() const;

private:
    std::vector<TaskNode> domains_;
};

/// Renders the profile for an explicit (domain, subcategory, difficulty)
/// path; throws if the path does not exist in the taxonomy.
TaskProfile render_profile(const Taxonomy& taxonomy, const std::string& domain_name,
                           const std::string& subcategory_name,
                           const std::string& difficulty_name);

TaskProfile make_profile(const TaskNode& domain, const TaskNode& subcategory,
                         const TaskNode& difficulty);

}  // namespace trouter::taxonomy
