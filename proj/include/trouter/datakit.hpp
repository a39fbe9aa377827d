#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/genclient.hpp"
#include "trouter/synthesis.hpp"
#include "trouter/taxonomy.hpp"

namespace trouter::datakit {

enum class Split { Unassigned, Train, Val, Test };

std::string_view split_name(Split split);
Split split_from_name(std::string_view name);

/// One (query, model) observation of the routing corpus.
struct MetricRecord {
    std::string query_id;
    std::string query_text;
    std::string model_id;
    double raw_perf = 0.0;  // judge score (or plugged scorer), already in [0,1]
    double raw_cost = 0.0;  // token-priced money
    std::optional<double> perf_norm;  // present only after normalize
    std::optional<double> cost_norm;
    std::optional<int> task_index;  // difficulty-level label; absent = uniform prior
    Split split = Split::Unassigned;
};

/// Min/max fitted on the training split; persisted next to the corpus so
/// inference normalizes identically.
struct NormStats {
    double perf_min = 0.0;
    double perf_max = 1.0;
    double cost_min = 0.0;
    double cost_max = 1.0;

    std::string to_json_text() const;
    static NormStats from_json_text(const std::string& text);
    static NormStats load(const std::string& path);
    void save(const std::string& path) const;
    std::string stable_hash() const;
};

struct Corpus {
    std::vector<MetricRecord> records;

    static Corpus load(const std::string& path);
    void save(const std::string& path) const;

    /// query_id -> indices into records, both sides deterministically ordered.
    std::map<std::string, std::vector<std::size_t>> by_query() const;
};

/// Scores a response against the reference with the judge prompt; parses the
/// first decimal in the reply and clamps to [0, 1]. ParseError after the
/// retry budget means the caller should mark the cell failed.
double judge_score(const std::string& question, const std::string& reference_answer,
                   const std::string& response, gen::GenClient& client,
                   const synthesis::GenOptions& options = {});

/// Candidate-model execution contract; a scripted mock in tests, live
/// backends in deployment.
class ModelExecutor {
public:
    virtual ~ModelExecutor() = default;
    virtual gen::Completion execute(const std::string& query_text,
                                    const catalog::ModelSpec& model) = 0;
};

/// Replays (model, query) cells from a transcript recorded with
/// system = "exec:<model_id>", user = query text.
class TranscriptExecutor : public ModelExecutor {
public:
    explicit TranscriptExecutor(gen::Transcript transcript)
        : transcript_(std::move(transcript)) {}

    gen::Completion execute(const std::string& query_text,
                            const catalog::ModelSpec& model) override;

    static std::string key_for(const std::string& model_id, const std::string& query_text);

private:
    gen::Transcript transcript_;
};

/// Alternative response scorer (question, reference answer, response) ->
/// score in [0, 1]. The judge-client path is the reference implementation;
/// task-specific metrics plug in here.
using ScorerHook = std::function<double(const std::string&, const std::string&,
                                        const std::string&)>;

struct CollectOptions {
    int executor_retries = 1;
    synthesis::GenOptions judge;
    int threads = 1;  // cells evaluated concurrently; output order is canonical either way
    ScorerHook scorer;  // when set, replaces the judge for raw_perf
};

struct CollectResult {
    Corpus corpus;
    int executor_failures = 0;
    int judge_failures = 0;
};

std::string query_id_for(const synthesis::QaPair& pair);

/// Evaluates every pool model on every dataset query: runs the executor,
/// scores the response with the judge, prices the usage. `profile_index`
/// maps profile ids to task indices so synthesized records carry their
/// origin label.
CollectResult collect(const synthesis::QaDataset& dataset, const catalog::ModelPool& pool,
                      ModelExecutor& executor, gen::GenClient& judge_client,
                      const std::map<std::string, int>& profile_index,
                      const CollectOptions& options = {});

/// Min-max normalization. Fits stats on the train split when none are given;
/// degenerate columns map to 0.5 and out-of-range values clamp to [0, 1].
NormStats normalize(std::vector<MetricRecord>& records,
                    const std::optional<NormStats>& stats = std::nullopt);

struct SplitRatios {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;
};

/// Assigns splits by query id (all records of one query share a split),
/// deterministic for a given seed.
void split(std::vector<MetricRecord>& records, const SplitRatios& ratios, std::uint64_t seed);

struct AnnotateResult {
    int annotated = 0;
    int unparseable = 0;  // left on the uniform-prior marker
};

/// Labels records that lack a task index by asking the client to pick one
/// difficulty-level profile per query. Records with an index are untouched.
AnnotateResult annotate_task_types(std::vector<MetricRecord>& records,
                                   const taxonomy::Taxonomy& taxonomy, gen::GenClient& client,
                                   const synthesis::GenOptions& options = {});

}  // namespace trouter::datakit
