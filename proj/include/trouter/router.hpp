#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/datakit.hpp"
#include "trouter/embedding.hpp"
#include "trouter/nn.hpp"
#include "trouter/taxonomy.hpp"

namespace trouter::router {

enum class Metric { Perf = 0, Cost = 1 };
inline constexpr std::size_t kMetricsPerModel = 2;

struct RouterConfig {
    std::size_t d_in = 0;
    std::size_t d_latent = 256;
    std::size_t hidden = 256;
    double tau = 0.07;
};

/// Which embedder a snapshot was trained with, so service and CLI reproduce
/// the exact query vectors. "external" marks snapshots whose embeddings are
/// supplied by the caller (constructed fixtures).
struct EmbedderSpec {
    std::string type = "hash_projection";
    std::size_t dim = 64;
    std::uint64_t seed = 1;
};

std::unique_ptr<embedding::EmbeddingProvider> make_embedder(const EmbedderSpec& spec);

/// All learnable state of the task-type-aware router plus the data it is
/// bound to (task inputs, model order, taxonomy/normalization hashes).
/// Immutable once trained; treat snapshots as values.
struct RouterParams {
    RouterConfig config;
    std::vector<std::string> model_ids;            // M, order fixes regressor indexing
    std::vector<std::string> profile_ids;          // K, order fixes task indexing
    std::vector<std::vector<double>> task_inputs;  // K x d_in encoder vectors of the profiles
    nn::Mlp2 query_proj;   // d_in -> hidden -> d_latent
    nn::Mlp2 task_proj;    // d_in -> hidden -> d_latent
    nn::Mlp2 scorer;       // pairwise (e_q, e_t) -> one logit per task type
    std::vector<nn::Mlp2> regressors;  // one head per (model, metric), d_latent -> hidden -> 1
    std::string taxonomy_hash;
    std::string normstats_hash;
    EmbedderSpec embedder;

    static RouterParams create(RouterConfig config, std::vector<std::string> model_ids,
                               std::vector<std::string> profile_ids,
                               std::vector<std::vector<double>> task_inputs, std::uint64_t seed);

    std::size_t task_count() const { return profile_ids.size(); }
    std::size_t model_count() const { return model_ids.size(); }
    std::size_t model_index(const std::string& model_id) const;

    nn::Mlp2& regressor(std::size_t model, Metric metric);
    const nn::Mlp2& regressor(std::size_t model, Metric metric) const;

    std::vector<nn::TensorRef> tensors();

    std::string to_json_text() const;
    static RouterParams from_json_text(const std::string& text);
    void save(const std::string& path) const;
    /// Refuses to load when `expected_taxonomy_hash` is given and mismatched.
    static RouterParams load(const std::string& path,
                             const std::optional<std::string>& expected_taxonomy_hash = {});
    std::string snapshot_hash() const;
};

/// Gradient buffers shaped like the learnable part of RouterParams.
struct RouterGrads {
    nn::Mlp2 query_proj;
    nn::Mlp2 task_proj;
    nn::Mlp2 scorer;
    std::vector<nn::Mlp2> regressors;

    static RouterGrads like(const RouterParams& params);
    void zero();
    std::vector<nn::TensorRef> tensors();
};

struct TaskPosterior {
    std::vector<double> l;  // length K, on the probability simplex
};

/// Temperature softmax over the pairwise recognition scores.
TaskPosterior recognize(const RouterParams& params, const std::vector<double>& query_embedding);

/// Posterior-weighted head prediction: sum_i l_i * sigmoid(head(e_t_i)).
double predict_metric(const RouterParams& params, const TaskPosterior& posterior,
                      const std::string& model_id, Metric metric);

/// Cross entropy of a one-hot label against the posterior, log clamped at
/// 1e-12.
double ce_loss(const std::vector<double>& posterior, int label);
double mse_loss(double predicted, double observed);

/// One training query: encoder vector, optional task label, and the observed
/// normalized metrics for every model (index-aligned with model_ids).
struct TrainExample {
    std::vector<double> query_input;
    std::optional<int> label;  // absent = uniform-prior marker: skipped by the CE term
    std::vector<double> perf;
    std::vector<double> cost;
};

/// Batch objective: mean CE over labeled examples plus 1/(M*|H|) times the
/// per-head mean squared errors.
double total_loss(const RouterParams& params, const std::vector<TrainExample>& batch);
double total_loss_and_grad(const RouterParams& params, const std::vector<TrainExample>& batch,
                           RouterGrads& grads);

struct TrainConfig {
    double lr = 1e-4;
    int epochs = 200;
    int batch_size = 64;
    std::uint64_t seed = 1;
    int patience = 10;
};

struct TrainingData {
    std::vector<TrainExample> train;
    std::vector<TrainExample> val;
    std::vector<std::string> model_ids;
    std::vector<std::string> profile_ids;
    std::vector<std::vector<double>> task_inputs;
    std::size_t d_in = 0;
    int skipped_incomplete = 0;  // queries missing a model cell or norm fields
};

/// Groups a normalized corpus by query, embeds query texts and task-profile
/// texts, and drops queries that lack a complete model row.
TrainingData build_training_data(const datakit::Corpus& corpus,
                                 const taxonomy::Taxonomy& taxonomy,
                                 const std::vector<std::string>& model_ids,
                                 embedding::EmbeddingProvider& embedder);

struct TrainResult {
    RouterParams params;
    std::vector<double> train_losses;
    std::vector<double> val_losses;
    int best_epoch = 0;
};

/// Adam on the batch objective with early stopping on validation loss.
/// Deterministic for a fixed seed. Throws on an empty corpus or on a
/// non-finite loss.
TrainResult train(const TrainingData& data, const RouterConfig& config,
                  const TrainConfig& train_config);

struct InferResult {
    std::string model_id;
    std::map<std::string, catalog::MetricPair> per_model;  // predicted (perf, cost)
    TaskPosterior posterior;
};

/// Full routing decision: recognize, predict both metrics for every model,
/// pick the utility argmax.
InferResult infer(const RouterParams& params, const std::vector<double>& query_embedding,
                  const catalog::PreferenceWeights& mu);

/// Top-k posterior entries as (profile_id, probability), descending.
std::vector<std::pair<std::string, double>> posterior_topk(const RouterParams& params,
                                                           const TaskPosterior& posterior,
                                                           std::size_t k);

// --- Evidence-bound diagnostics on small enumerable instances ---

/// A discrete instance: prior p(t|q), per-type likelihood p(h_obs|t,m), and a
/// variational distribution over the same K types.
struct ElboInstance {
    std::vector<double> prior;
    std::vector<double> likelihood;
    std::vector<double> variational;
};

struct ElboReport {
    double elbo = 0.0;
    double log_likelihood = 0.0;
    double gap = 0.0;  // log_likelihood - elbo; equals KL(variational || exact posterior)
};

ElboReport elbo_check(const ElboInstance& instance);
std::vector<double> exact_posterior(const ElboInstance& instance);
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace trouter::router
