#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/datakit.hpp"
#include "trouter/embedding.hpp"
#include "trouter/taxonomy.hpp"

namespace trouter::evalharness {

struct Scenario {
    std::string name;
    catalog::PreferenceWeights mu;
};

/// The standard trio: cost-first (0.2, 0.8), balanced (0.5, 0.5),
/// performance-first (0.8, 0.2).
std::vector<Scenario> default_scenarios();

/// What a policy sees per query: the text plus the observed per-model
/// metrics (the oracle's input; learned policies ignore it).
struct RoutingContext {
    std::string query_id;
    std::string query_text;
    const std::map<std::string, catalog::MetricPair>* observed = nullptr;
};

using Policy =
    std::function<std::string(const RoutingContext&, const catalog::PreferenceWeights&)>;

struct ScenarioRow {
    std::string scenario;
    double mu_r = 0.0;
    double mean_cost = 0.0;
    double mean_perf = 0.0;
    double utility = 0.0;             // mu_r * mean_perf - mu_c * mean_cost
    double utility_query_mean = 0.0;  // mean of per-query utilities; equal by linearity
};

struct ScenarioReport {
    std::vector<ScenarioRow> rows;
    double utility_sum = 0.0;
};

/// Routes every query of the corpus once per scenario and averages the
/// realized normalized metrics of the chosen models. The corpus must be
/// normalized and hold a record for every chosen (query, model) cell.
ScenarioReport evaluate(const Policy& policy, const datakit::Corpus& corpus,
                        const std::vector<Scenario>& scenarios = default_scenarios());

enum class ReportFormat { Table, Delimited, PlotData };

/// Renders reports for a set of named policies. PlotData rows carry exactly
/// five columns (scenario, policy, cost, perf, utility); per-query utility
/// means appear as extra rows under "<scenario>/per-query".
std::string emit_report(const std::vector<std::pair<std::string, ScenarioReport>>& reports,
                        ReportFormat format);

// --- Synthetic routing world ---

struct WorldOptions {
    std::size_t K = 20;          // difficulty-level task types
    std::size_t M = 4;           // pool size
    double noise_sigma = 0.05;   // observation noise on both metrics
    int train_per_type = 30;
    int val_per_type = 10;
    int test_per_type = 10;
    std::size_t d_in = 0;        // 0: one-hot type centers (d_in = K)
    double embed_noise = 0.05;   // query scatter around its type center
};

/// A fully observable routing world where both metrics depend on the query
/// only through its task type: per-(type, model) ground-truth tables, query
/// embeddings clustered by type, Gaussian observation noise, a complete
/// split corpus, and the embedder that reproduces every vector.
struct SyntheticWorld {
    taxonomy::Taxonomy taxonomy;
    catalog::ModelPool pool;
    datakit::Corpus corpus;
    std::shared_ptr<embedding::TableEmbedder> embedder;
    std::vector<std::vector<double>> true_perf;  // K x M
    std::vector<std::vector<double>> true_cost;  // K x M
    std::vector<std::string> model_ids;

    SyntheticWorld(taxonomy::Taxonomy tax, catalog::ModelPool pool_in)
        : taxonomy(std::move(tax)), pool(std::move(pool_in)) {}
};

SyntheticWorld synthetic_world(std::uint64_t seed, const WorldOptions& options = {});

/// Records of one split as their own corpus.
datakit::Corpus filter_split(const datakit::Corpus& corpus, datakit::Split split);

/// Keeps at most `shots` train-split queries per task type (by query order);
/// val and test records pass through untouched.
datakit::Corpus limit_train_shots(const datakit::Corpus& corpus, int shots);

}  // namespace trouter::evalharness
