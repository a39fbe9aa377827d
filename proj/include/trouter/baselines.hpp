#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/datakit.hpp"
#include "trouter/embedding.hpp"
#include "trouter/genclient.hpp"
#include "trouter/nn.hpp"
#include "trouter/router.hpp"

namespace trouter::baselines {

/// Parses size labels like "0.6B", "14B", "235B" into billions of
/// parameters; nullopt when the label is absent or unparseable.
std::optional<double> parse_size_billions(const std::optional<std::string>& size_label);

/// Deterministic pool ordering: ascending parameter count when every model
/// has one, otherwise ascending combined (input + output) price; ties broken
/// by combined price, then model_id.
std::vector<std::string> rank_models(const std::vector<catalog::ModelSpec>& models);

std::string smallest(const std::vector<catalog::ModelSpec>& models);
std::string largest(const std::vector<catalog::ModelSpec>& models);

/// Rule-based policy: largest for performance-first, lower-median for
/// balanced, smallest for cost-first.
std::string adaptive(const std::vector<catalog::ModelSpec>& models,
                     const catalog::PreferenceWeights& mu);

struct PromptSelection {
    std::string model_id;
    bool used_fallback = false;  // reply did not name a pool model
};

std::string render_select_prompt(const std::string& query,
                                 const std::vector<catalog::ModelSpec>& models,
                                 const catalog::PreferenceWeights& mu);

/// Asks an external model to pick from the pool; falls back to adaptive when
/// the reply names no pool model.
PromptSelection prompt_select(const std::string& query,
                              const std::vector<catalog::ModelSpec>& models,
                              const catalog::PreferenceWeights& mu, gen::GenClient& client);

/// Utility argmax over the observed normalized metrics of one query; the
/// per-query upper bound every learned policy is compared against.
std::string oracle(const std::map<std::string, catalog::MetricPair>& observed,
                   const catalog::PreferenceWeights& mu);

// --- Regression-only router (no latent task variable, no CE term) ---

struct MetricRouterParams {
    std::size_t d_in = 0;
    std::size_t d_latent = 256;
    std::size_t hidden = 256;
    std::vector<std::string> model_ids;
    nn::Mlp2 proj;                     // d_in -> hidden -> d_latent
    std::vector<nn::Mlp2> regressors;  // one head per (model, metric) on the query projection

    router::EmbedderSpec embedder;
    std::string normstats_hash;

    static MetricRouterParams create(std::size_t d_in, std::size_t d_latent, std::size_t hidden,
                                     std::vector<std::string> model_ids, std::uint64_t seed);
    std::vector<nn::TensorRef> tensors();
    std::size_t model_count() const { return model_ids.size(); }

    std::string to_json_text() const;
    static MetricRouterParams from_json_text(const std::string& text);
    void save(const std::string& path) const;
    static MetricRouterParams load(const std::string& path);
};

struct MetricRouterGrads {
    nn::Mlp2 proj;
    std::vector<nn::Mlp2> regressors;

    static MetricRouterGrads like(const MetricRouterParams& params);
    void zero();
    std::vector<nn::TensorRef> tensors();
};

/// 1/(M*|H|)-scaled mean squared error over all heads; there is no task
/// machinery, so there is no cross-entropy term.
double metric_router_loss(const MetricRouterParams& params,
                          const std::vector<router::TrainExample>& batch);
double metric_router_loss_and_grad(const MetricRouterParams& params,
                                   const std::vector<router::TrainExample>& batch,
                                   MetricRouterGrads& grads);

struct MetricRouterTrainResult {
    MetricRouterParams params;
    std::vector<double> train_losses;
    std::vector<double> val_losses;
};

MetricRouterTrainResult metric_router_train(const router::TrainingData& data,
                                            std::size_t d_latent, std::size_t hidden,
                                            const router::TrainConfig& config);

router::InferResult metric_router_infer(const MetricRouterParams& params,
                                        const std::vector<double>& query_embedding,
                                        const catalog::PreferenceWeights& mu);

}  // namespace trouter::baselines
