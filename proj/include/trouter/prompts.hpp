#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trouter::prompts {

// Node-count caps baked into the generation prompts.
inline constexpr int kMaxNewDomainNodes = 4;
inline constexpr int kMaxSubcategoryNodes = 10;
inline constexpr int kMaxDifficultyLevelNodes = 5;

// Raw templates with `{placeholder}` markers still in place.
namespace templates {
extern const std::string_view kTaskTypeGenSystemPrompt;
extern const std::string_view kDomainNodeRule;
extern const std::string_view kSubcategoryNodeRule;
extern const std::string_view kDifficultyLevelNodeRule;
extern const std::string_view kDomainNodePrompt;
extern const std::string_view kSubcategoryNodePrompt;
extern const std::string_view kDifficultyNodePrompt;
extern const std::string_view kNodeRevisePrompt;
extern const std::string_view kNodeSetChoicePrompt;
extern const std::string_view kQaGenPreamble;
extern const std::string_view kQaGenSuffix;
extern const std::string_view kDomainNodeProfile;
extern const std::string_view kSubcategoryNodeProfile;
extern const std::string_view kDifficultyNodeProfile;
extern const std::string_view kJudgePrompt;
}  // namespace templates

/// One candidate entry of a node set, as it appears inside a `<node begin>`
/// block: a level label line, a definition line, and an example line.
struct NodeEntry {
    std::string short_name;
    std::string definition;
    std::string example;

    bool operator==(const NodeEntry&) const = default;
};

/// Renders entries as label/Definition/Example triples separated by blank
/// lines; the form used both in prompt examples and in evaluator inputs.
std::string format_node_set(const std::vector<NodeEntry>& entries, std::string_view label);

std::string render_domain_prompt();
std::string render_subcategory_prompt(const std::string& domain_name,
                                      const std::string& domain_definition,
                                      const std::string& domain_example);
std::string render_difficulty_prompt(const std::string& domain_name,
                                     const std::string& subcategory_name,
                                     const std::string& subcategory_definition,
                                     const std::string& subcategory_example);

std::string render_node_revise_prompt(std::string_view node_name, std::string_view label,
                                      std::string_view rules,
                                      const std::string& candidate_set_text);
std::string render_node_set_choice_prompt(std::string_view node_name, std::string_view rules,
                                          const std::string& set_a_text,
                                          const std::string& set_b_text);

std::string render_domain_profile(const std::string& domain_name,
                                  const std::string& domain_definition);
std::string render_subcategory_profile(const std::string& domain_name,
                                       const std::string& domain_definition,
                                       const std::string& subcategory_name,
                                       const std::string& subcategory_definition);
std::string render_difficulty_profile(const std::string& domain_name,
                                      const std::string& domain_definition,
                                      const std::string& subcategory_name,
                                      const std::string& subcategory_definition,
                                      const std::string& difficulty_name,
                                      const std::string& difficulty_definition);

std::string render_qa_prompt(const std::string& profile_text, int question_num);

std::string render_judge_prompt(const std::string& question, const std::string& reference_answer,
                                const std::string& response);

}  // namespace trouter::prompts
