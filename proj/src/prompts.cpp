#include "trouter/prompts.hpp"

#include "trouter/common.hpp"

namespace trouter::prompts {
namespace templates {

// Tail whitespace and spacing inside these literals is load-bearing: rendered
// prompts are compared byte-for-byte against golden files.

const std::string_view kTaskTypeGenSystemPrompt = R"__(
You are a knowledge graph construction expert. Your task is to help build a hierarchical classification system for an intelligent model router called AgenticiRouter.

AgenticiRouter selects the most appropriate Large Language Model (LLM) based on a user's query and preferences (e.g., performance, cost-efficiency, latency). To support this, we are building a multi-level taxonomy of query types.

Each query is classified into a three-level node path:

Domain — broad task area
Subcategory — specific task type
Difficulty Level — complexity level within that task type
)__";

const std::string_view kDomainNodeRule = R"__(
- Domains must be general yet semantically distinct.
- Avoid overlapping or ambiguous categories.
- Think of areas commonly found in LLM benchmarks (e.g., MMLU, AGIEval, CMMLU) and real-world applications.
- These will serve as the top-level nodes of the taxonomy.
- Only up to {max_new_domain_nodes} new domains can be proposed.
)__";

const std::string_view kSubcategoryNodeRule = R"__(
- Avoid overlap between subcategories.
- Each subcategory should represent a common type of user query that can be grouped under this domain.
- Subcategories should be general enough to cover many user queries but specific enough to guide model selection.
- Only up to {max_subcategory_nodes} new Subcategory Nodes can be proposed for each domain node.
)__";

const std::string_view kDifficultyLevelNodeRule = R"__(
- Levels must be ordered from easiest to hardest.
- Levels should reflect increasing reasoning complexity, token usage, or LLM capability required.
- Levels should be mutually exclusive — no query should belong to more than one level.
- Levels should be collectively exhaustive — all queries in this subcategory must be covered.
- Avoid generic differences like “longer text” unless it reflects actual difficulty in reasoning or generation.
- Only up to {max_difficulty_level_nodes} Difficulty Level Nodes can be proposed for each Subcategory Node.
)__";

const std::string_view kDomainNodePrompt = R"__(
**Step 1: Generate Domain Nodes**

Generate a list of distinct, non-overlapping **Domain** categories that represent broad types of user tasks.

We have already defined the following six initial Domains:

- Mathematics
- Creative Writing
- Commonsense Knowledge
- Programming
- Long-context Understanding
- Reading Comprehension

Please propose **{max_new_domain_nodes}  new high-level Domains** that:

**Rules:**

{DomainNodeRule}

**Output Format:**

For each proposed Domain:
- Name the Domain
- Provide a one-sentence definition
- Include a real-world example query

**Example:**
<node begin>
Domain: Mathematics
Definition: Covers quantitative problem-solving tasks involving numbers, equations, logic, or formal systems, including arithmetic, algebra, calculus, and more.
Example: What is the derivative of sin(x)?

Domain: Creative Writing
Definition: Involves imaginative or artistic language generation tasks such as writing poems, stories, scripts, or creative descriptions.
Example: Write a short story about a robot who learns to paint.
</node end>

**Output:**
)__";

const std::string_view kSubcategoryNodePrompt = R"__(
**Step 2: Generate Subcategories for a Given Domain**

The current Domain is: {domain_name}
Domain Definition: {domain_definition}
Domain Example: {domain_example}

Please generate a list of fine-grained Subcategories Nodes that represent specific types of tasks or problem types within this domain.

Please propose **up to {max_subcategory_nodes} new Subcategory Nodes** for each domain node that:

**Rules:**

{SubcategoryNodeRule}

**Output Format:**
For each proposed Domain:
- Name the Subcategory
- Provide a one-sentence definition
- Include a real-world example query


Example:

Assume the Domain is:

Domain_name: Mathematics
Domain Definition: Covers quantitative problem-solving tasks involving numbers, equations, logic, or formal systems, including arithmetic, algebra, calculus, and more.
Domain Example: What is the derivative of sin(x)?

Then the Subcategory Nodes are:

<node begin>
Subcategory: Arithmetic
Definition: Covers basic arithmetic operations and problem-solving involving numbers, including addition, subtraction, multiplication, and division.
Example: What is the sum of 123 and 456?

Subcategory: Algebra
Definition: Involves solving equations and expressions using variables and algebraic manipulation.
Example: Solve for x in the equation 2x + 3 = 11.

...
</node end>

**Output:**:
)__";

const std::string_view kDifficultyNodePrompt = R"__(
Step 3: Define Difficulty Levels for a Given Subcategory

You are now working on level 3: **Difficulty Level**. This level captures how task complexity varies **within a specific Subcategory**.

Please utilize a fixed global scale (e.g., Easy / Medium / Hard for three-level difficulty) as the short name of each level.
However, the Definition of each level should be customized based on the nature of the specific Subcategory.

**Input Subcategory Information:**
- Domain: {domain_name}
- Subcategory: {subcategory_name}
- Subcategory Definition: {subcategory_definition}
- Subcategory Example Query: {subcategory_example}

Please propose **up to {max_difficulty_level_nodes} Difficulty Level Nodes** that:

**Rules:**

{DifficultyLevelNodeRule}

**Output Format:**

For each proposed level:
- Name the Level
- Provide a one-sentence definition
- Include a real-world example query

**Example**(Subcategory: Code Debugging):
Assume the Subcategory is  Code Debugging.
Definition: Identifying and fixing errors in code snippets written in common programming languages.

Then the Subcategory Nodes are:
<node begin>
Level: Basic
Definition: Single-line or syntax-only bugs in short, self-contained functions.
Example: Fix the indentation error in this 5-line Python function.

Level: Intermediate
Definition: Logic bugs in medium-length code that require control flow analysis.
Example: Fix the loop condition that causes an infinite loop in this JavaScript function.

Level: Advanced
Definition: Bugs across multiple functions, handling of edge cases, or requiring domain-specific knowledge.
Example: Fix the bug in this Flask app that breaks when uploading empty files.

Level: Expert
Definition: Deep reasoning over large codebases, concurrency, or memory management.
Example: Fix the deadlock issue in this multi-threaded C++ program handling file writes.
</node end>

**Output:**
)__";

const std::string_view kNodeRevisePrompt = R"__(
You are given a **candidate {node_name} set** for review. Your job is to:


1. Evaluate whether this candidate {node_name} set needs improvement by checking how well it adheres to the provided generation rules..

2. If improvement is needed, generate a revised and higher-quality version of the {node_name} set that better satisfies the rules and supports downstream LLM routing decisions.

Current Candidate {node_name} Set:

{candidate_node_set}

**Node Generation Rules:**

{node_gen_rules}

**Output Format:**
<justification>
Explain whether the current {node_name} set is flawed or could be improved. Mention overlap, vagueness, gaps, etc.
</justification>

<revision node begin>
{node_name_short}: node name
Definition: One-sentence definition
Example: Example query or task

{node_name_short}: node name
Definition: One-sentence definition
Example: Example query or task
</revision node end>

**Output:**)__";

const std::string_view kNodeSetChoicePrompt = R"__(

Your Task: You are given **two candidate {node_name} sets**, labeled **Set A** and **Set B**. Your job is to:

1. Compare both sets based on how well they follow the generation rules.
2. Select the better set — the one that provides more clarity, distinctiveness, usefulness, and alignment with routing goals.
3. Justify your choice in detail.

**Node Generation Rules:**

{node_gen_rules}

**Candidate Sets:**

Set A:

{candidate_node_set_a}

Set B:

{candidate_node_set_b}

**Output Format:**
<justification>
Explain why one set is better than the other. Reference the rules. Mention clarity, distinctiveness, coverage, usefulness, etc.
</justification>
<preferred set>
Set A / Set B
</preferred set>

**Output:**
)__";

const std::string_view kQaGenPreamble = R"__(
You are a helpful assistant that generates high-quality question-answer pairs.
You must respond with a specific format using markers to structure your output.

IMPORTANT: Your response must follow this exact format:

<qa_pairs begin>
Q: What is 2+2?
A: 2+2 equals 4

Q: What is the capital of France?
A: The capital of France is Paris

Q: How does photosynthesis work?
A: Photosynthesis is the process by which plants convert sunlight into energy.
</qa_pairs end>

Rules:
- Start with <qa_pairs begin> and end with </qa_pairs end>
- Each QA pair should be separated by a blank line
- Use "Q:" for questions and "A:" for answers
- Ensure questions are clear, relevant, and the answers are accurate and comprehensive)__";

const std::string_view kQaGenSuffix =
    R"__(Please generate {question_num} different question-answer pairs according to all the above specifications.
    The questions should be clear, relevant, and the answers should be comprehensive and accurate.
    Focus on creating diverse questions that cover different aspects of the topic.)__";

const std::string_view kDomainNodeProfile = R"__(
Task Domain: {domain_name}
Domain Definition:
{domain_definition})__";

const std::string_view kSubcategoryNodeProfile = R"__(
Task Domain: {domain_name}
Domain Definition: {domain_definition}
Task Subcategory: {subcategory_name}
Subcategory Definition: {subcategory_definition})__";

const std::string_view kDifficultyNodeProfile = R"__(
Task Domain: {domain_name}
Domain Definition: {domain_definition}
Task Subcategory: {subcategory_name}
Subcategory Definition: {subcategory_definition}
Task Difficulty: {difficulty_name}
Difficulty Definition: {difficulty_definition})__";

const std::string_view kJudgePrompt =
    R"__(You are an expert evaluator. Your task is to score the quality and correctness of a model-generated answer to a given question, using a reference answer as the gold standard.

You will be given:
- QUESTION
- REFERENCE ANSWER (correct)
- MODEL ANSWER (to evaluate)

Your goal is to assign a score between **0.0 and 1.0**, where:
- 1.0 = Fully correct and semantically equivalent to the reference.
- 0.5 = Partially correct or incomplete
- 0.0 = Completely incorrect, irrelevant, or nonsensical

Respond with **only the numeric score**, nothing else.

---

QUESTION:
{question}

REFERENCE ANSWER:
{reference_answer}

MODEL ANSWER:
{response}.
Your score:)__";

}  // namespace templates

namespace {

std::string with_system(std::string_view body) {
    std::string out(templates::kTaskTypeGenSystemPrompt);
    out.append(body);
    return out;
}

}  // namespace

std::string format_node_set(const std::vector<NodeEntry>& entries, std::string_view label) {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out += "\n";
        out += std::string(label) + ": " + entries[i].short_name + "\n";
        out += "Definition: " + entries[i].definition + "\n";
        out += "Example: " + entries[i].example + "\n";
    }
    return out;
}

std::string render_domain_prompt() {
    std::string text = with_system(templates::kDomainNodePrompt);
    text = replace_all(std::move(text), "{DomainNodeRule}", templates::kDomainNodeRule);
    return replace_all(std::move(text), "{max_new_domain_nodes}",
                       std::to_string(kMaxNewDomainNodes));
}

std::string render_subcategory_prompt(const std::string& domain_name,
                                      const std::string& domain_definition,
                                      const std::string& domain_example) {
    std::string text = with_system(templates::kSubcategoryNodePrompt);
    text = replace_all(std::move(text), "{SubcategoryNodeRule}", templates::kSubcategoryNodeRule);
    text = replace_all(std::move(text), "{max_subcategory_nodes}",
                       std::to_string(kMaxSubcategoryNodes));
    text = replace_all(std::move(text), "{domain_name}", domain_name);
    text = replace_all(std::move(text), "{domain_definition}", domain_definition);
    return replace_all(std::move(text), "{domain_example}", domain_example);
}

std::string render_difficulty_prompt(const std::string& domain_name,
                                     const std::string& subcategory_name,
                                     const std::string& subcategory_definition,
                                     const std::string& subcategory_example) {
    std::string text = with_system(templates::kDifficultyNodePrompt);
    text = replace_all(std::move(text), "{DifficultyLevelNodeRule}",
                       templates::kDifficultyLevelNodeRule);
    text = replace_all(std::move(text), "{max_difficulty_level_nodes}",
                       std::to_string(kMaxDifficultyLevelNodes));
    text = replace_all(std::move(text), "{domain_name}", domain_name);
    text = replace_all(std::move(text), "{subcategory_name}", subcategory_name);
    text = replace_all(std::move(text), "{subcategory_definition}", subcategory_definition);
    return replace_all(std::move(text), "{subcategory_example}", subcategory_example);
}

std::string render_node_revise_prompt(std::string_view node_name, std::string_view label,
                                      std::string_view rules,
                                      const std::string& candidate_set_text) {
    std::string text = with_system(templates::kNodeRevisePrompt);
    text = replace_all(std::move(text), "{node_name_short}", label);
    text = replace_all(std::move(text), "{node_name}", node_name);
    text = replace_all(std::move(text), "{node_gen_rules}", rules);
    return replace_all(std::move(text), "{candidate_node_set}", candidate_set_text);
}

std::string render_node_set_choice_prompt(std::string_view node_name, std::string_view rules,
                                          const std::string& set_a_text,
                                          const std::string& set_b_text) {
    std::string text = with_system(templates::kNodeSetChoicePrompt);
    text = replace_all(std::move(text), "{node_name}", node_name);
    text = replace_all(std::move(text), "{node_gen_rules}", rules);
    text = replace_all(std::move(text), "{candidate_node_set_a}", set_a_text);
    return replace_all(std::move(text), "{candidate_node_set_b}", set_b_text);
}

std::string render_domain_profile(const std::string& domain_name,
                                  const std::string& domain_definition) {
    std::string text(templates::kDomainNodeProfile);
    text = replace_all(std::move(text), "{domain_name}", domain_name);
    return replace_all(std::move(text), "{domain_definition}", domain_definition);
}

std::string render_subcategory_profile(const std::string& domain_name,
                                       const std::string& domain_definition,
                                       const std::string& subcategory_name,
                                       const std::string& subcategory_definition) {
    std::string text(templates::kSubcategoryNodeProfile);
    text = replace_all(std::move(text), "{domain_name}", domain_name);
    text = replace_all(std::move(text), "{domain_definition}", domain_definition);
    text = replace_all(std::move(text), "{subcategory_name}", subcategory_name);
    return replace_all(std::move(text), "{subcategory_definition}", subcategory_definition);
}

std::string render_difficulty_profile(const std::string& domain_name,
                                      const std::string& domain_definition,
                                      const std::string& subcategory_name,
                                      const std::string& subcategory_definition,
                                      const std::string& difficulty_name,
                                      const std::string& difficulty_definition) {
    std::string text(templates::kDifficultyNodeProfile);
    text = replace_all(std::move(text), "{domain_name}", domain_name);
    text = replace_all(std::move(text), "{domain_definition}", domain_definition);
    text = replace_all(std::move(text), "{subcategory_name}", subcategory_name);
    text = replace_all(std::move(text), "{subcategory_definition}", subcategory_definition);
    text = replace_all(std::move(text), "{difficulty_name}", difficulty_name);
    return replace_all(std::move(text), "{difficulty_definition}", difficulty_definition);
}

std::string render_qa_prompt(const std::string& profile_text, int question_num) {
    std::string text(templates::kQaGenPreamble);
    text += profile_text;
    text += templates::kQaGenSuffix;
    return replace_all(std::move(text), "{question_num}", std::to_string(question_num));
}

std::string render_judge_prompt(const std::string& question, const std::string& reference_answer,
                                const std::string& response) {
    std::string text(templates::kJudgePrompt);
    text = replace_all(std::move(text), "{question}", question);
    text = replace_all(std::move(text), "{reference_answer}", reference_answer);
    return replace_all(std::move(text), "{response}", response);
}

}  // namespace trouter::prompts
