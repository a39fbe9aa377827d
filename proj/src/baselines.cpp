#include "trouter/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "trouter/nn_serialize.hpp"

namespace trouter::baselines {

std::optional<double> parse_size_billions(const std::optional<std::string>& size_label) {
    if (!size_label) return std::nullopt;
    const std::string& label = *size_label;
    std::size_t pos = 0;
    while (pos < label.size() &&
           (std::isdigit(static_cast<unsigned char>(label[pos])) || label[pos] == '.'))
        ++pos;
    if (pos == 0) return std::nullopt;
    double value = 0.0;
    try {
        value = std::stod(label.substr(0, pos));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (pos < label.size()) {
        const char unit = static_cast<char>(std::toupper(static_cast<unsigned char>(label[pos])));
        if (unit == 'M') value /= 1000.0;
        else if (unit == 'T') value *= 1000.0;
        else if (unit != 'B') return std::nullopt;
    }
    return value;
}

std::vector<std::string> rank_models(const std::vector<catalog::ModelSpec>& models) {
    if (models.empty()) throw RouterError("empty pool");
    bool all_sized = true;
    for (const auto& m : models)
        if (!parse_size_billions(m.size_label)) all_sized = false;

    std::vector<std::size_t> order(models.size());
    std::iota(order.begin(), order.end(), 0);
    auto combined_price = [&](std::size_t i) {
        return models[i].input_price + models[i].output_price;
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (all_sized) {
            const double sa = *parse_size_billions(models[a].size_label);
            const double sb = *parse_size_billions(models[b].size_label);
            if (sa != sb) return sa < sb;
        }
        if (combined_price(a) != combined_price(b)) return combined_price(a) < combined_price(b);
        return models[a].model_id < models[b].model_id;
    });

    std::vector<std::string> ranked;
    ranked.reserve(models.size());
    for (std::size_t i : order) ranked.push_back(models[i].model_id);
    return ranked;
}

std::string smallest(const std::vector<catalog::ModelSpec>& models) {
    return rank_models(models).front();
}

std::string largest(const std::vector<catalog::ModelSpec>& models) {
    return rank_models(models).back();
}

std::string adaptive(const std::vector<catalog::ModelSpec>& models,
                     const catalog::PreferenceWeights& mu) {
    const auto ranked = rank_models(models);
    if (mu.mu_r() > mu.mu_c()) return ranked.back();
    if (mu.mu_r() < mu.mu_c()) return ranked.front();
    return ranked[(ranked.size() - 1) / 2];  // lower median on even pools
}

namespace {

std::string format_weight(double w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", w);
    return buf;
}

std::string objective_text(const catalog::PreferenceWeights& mu) {
    std::string goal;
    if (mu.mu_r() > mu.mu_c())
        goal = "prioritize response quality over cost";
    else if (mu.mu_r() < mu.mu_c())
        goal = "prioritize low cost over response quality";
    else
        goal = "balance response quality and cost";
    return goal + " (performance weight " + format_weight(mu.mu_r()) + ", cost weight " +
           format_weight(mu.mu_c()) + ")";
}

}  // namespace

std::string render_select_prompt(const std::string& query,
                                 const std::vector<catalog::ModelSpec>& models,
                                 const catalog::PreferenceWeights& mu) {
    std::string pool_text;
    for (const auto& m : models) {
        pool_text += "- " + m.model_id;
        if (m.size_label) pool_text += " (size " + *m.size_label + ")";
        pool_text += ", input price " + std::to_string(m.input_price) + "/M tokens, output price " +
                     std::to_string(m.output_price) + "/M tokens\n";
    }
    std::string text =
        "You route user queries to one Large Language Model from a candidate pool.\n"
        "Select the single most suitable model for the query under the stated objective.\n"
        "\n"
        "Objective: {objective}\n"
        "\n"
        "Candidate models:\n"
        "{pool}\n"
        "Query:\n"
        "{query}\n"
        "\n"
        "Reply with only the chosen model id.";
    text = replace_all(std::move(text), "{objective}", objective_text(mu));
    text = replace_all(std::move(text), "{pool}", pool_text);
    return replace_all(std::move(text), "{query}", query);
}

PromptSelection prompt_select(const std::string& query,
                              const std::vector<catalog::ModelSpec>& models,
                              const catalog::PreferenceWeights& mu, gen::GenClient& client) {
    const auto completion = client.complete("", render_select_prompt(query, models, mu));

    // Leftmost pool-id mention wins; the longer id wins on nested mentions
    // (e.g. "m-7" inside "m-70").
    std::size_t best_pos = std::string::npos;
    std::size_t best_len = 0;
    std::string best_id;
    for (const auto& m : models) {
        const std::size_t pos = completion.text.find(m.model_id);
        if (pos == std::string::npos) continue;
        if (pos < best_pos || (pos == best_pos && m.model_id.size() > best_len)) {
            best_pos = pos;
            best_len = m.model_id.size();
            best_id = m.model_id;
        }
    }
    if (!best_id.empty()) return {best_id, false};
    return {adaptive(models, mu), true};
}

std::string oracle(const std::map<std::string, catalog::MetricPair>& observed,
                   const catalog::PreferenceWeights& mu) {
    return catalog::select_best(mu, observed);
}

// --- regression-only router ---

MetricRouterParams MetricRouterParams::create(std::size_t d_in, std::size_t d_latent,
                                              std::size_t hidden,
                                              std::vector<std::string> model_ids,
                                              std::uint64_t seed) {
    if (model_ids.empty()) throw RouterError("router needs at least one model");
    MetricRouterParams params;
    params.d_in = d_in;
    params.d_latent = d_latent;
    params.hidden = hidden;
    params.model_ids = std::move(model_ids);
    std::mt19937_64 rng(seed);
    params.proj = nn::Mlp2(d_in, hidden, d_latent);
    params.proj.init(rng);
    for (std::size_t i = 0; i < params.model_ids.size() * router::kMetricsPerModel; ++i) {
        params.regressors.emplace_back(d_latent, hidden, 1);
        params.regressors.back().init(rng);
    }
    return params;
}

std::vector<nn::TensorRef> MetricRouterParams::tensors() {
    auto refs = proj.tensors();
    for (auto& r : regressors) {
        auto more = r.tensors();
        refs.insert(refs.end(), more.begin(), more.end());
    }
    return refs;
}

MetricRouterGrads MetricRouterGrads::like(const MetricRouterParams& params) {
    MetricRouterGrads grads;
    grads.proj = nn::Mlp2(params.d_in, params.hidden, params.d_latent);
    grads.regressors.assign(params.regressors.size(),
                            nn::Mlp2(params.d_latent, params.hidden, 1));
    return grads;
}

void MetricRouterGrads::zero() {
    proj.zero();
    for (auto& r : regressors) r.zero();
}

std::vector<nn::TensorRef> MetricRouterGrads::tensors() {
    auto refs = proj.tensors();
    for (auto& r : regressors) {
        auto more = r.tensors();
        refs.insert(refs.end(), more.begin(), more.end());
    }
    return refs;
}

namespace {

double metric_router_pass(const MetricRouterParams& params,
                          const std::vector<router::TrainExample>& batch,
                          MetricRouterGrads* grads) {
    if (batch.empty()) throw RouterError("empty batch");
    const std::size_t M = params.model_count();
    const std::size_t heads = M * router::kMetricsPerModel;
    const double batch_size = static_cast<double>(batch.size());

    std::vector<double> mse_sum(heads, 0.0);
    nn::Mlp2::Cache proj_cache;
    std::vector<nn::Mlp2::Cache> head_caches(heads);
    std::vector<double> e;
    std::vector<double> out;
    std::vector<double> d_e;
    std::vector<double> d_inp;

    for (const auto& ex : batch) {
        if (ex.perf.size() != M || ex.cost.size() != M)
            throw RouterError("example metric vectors must cover every model");
        params.proj.forward(ex.query_input, e, grads ? &proj_cache : nullptr);
        if (grads) d_e.assign(e.size(), 0.0);
        for (std::size_t j = 0; j < heads; ++j) {
            const std::size_t m = j / router::kMetricsPerModel;
            const double observed =
                (j % router::kMetricsPerModel == 0) ? ex.perf[m] : ex.cost[m];
            params.regressors[j].forward(e, out, grads ? &head_caches[j] : nullptr);
            const double predicted = nn::sigmoid(out[0]);
            const double diff = predicted - observed;
            mse_sum[j] += diff * diff;
            if (grads) {
                const double d_pred = diff / (static_cast<double>(M) * batch_size);
                params.regressors[j].backward(head_caches[j],
                                              {d_pred * predicted * (1.0 - predicted)},
                                              grads->regressors[j], &d_inp);
                for (std::size_t d = 0; d < d_e.size(); ++d) d_e[d] += d_inp[d];
            }
        }
        if (grads) params.proj.backward(proj_cache, d_e, grads->proj, nullptr);
    }

    double loss = 0.0;
    for (double m : mse_sum) loss += m / batch_size;
    loss /= static_cast<double>(heads);
    if (!std::isfinite(loss)) throw RouterError("non-finite loss");
    return loss;
}

}  // namespace

double metric_router_loss(const MetricRouterParams& params,
                          const std::vector<router::TrainExample>& batch) {
    return metric_router_pass(params, batch, nullptr);
}

double metric_router_loss_and_grad(const MetricRouterParams& params,
                                   const std::vector<router::TrainExample>& batch,
                                   MetricRouterGrads& grads) {
    grads.zero();
    return metric_router_pass(params, batch, &grads);
}

MetricRouterTrainResult metric_router_train(const router::TrainingData& data,
                                            std::size_t d_latent, std::size_t hidden,
                                            const router::TrainConfig& config) {
    if (data.train.empty()) throw RouterError("empty training corpus");

    MetricRouterTrainResult result;
    result.params =
        MetricRouterParams::create(data.d_in, d_latent, hidden, data.model_ids, config.seed);
    MetricRouterGrads grads = MetricRouterGrads::like(result.params);
    nn::Adam adam(config.lr);
    const auto param_refs = result.params.tensors();
    const auto grad_refs = grads.tensors();

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), 0);

    MetricRouterParams best = result.params;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    const auto batch_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(config.batch_size));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            std::vector<router::TrainExample> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i)
                batch.push_back(data.train[order[i]]);
            epoch_loss += metric_router_loss_and_grad(result.params, batch, grads);
            adam.step(param_refs, grad_refs);
            ++batches;
        }
        result.train_losses.push_back(epoch_loss / static_cast<double>(batches));

        if (!data.val.empty()) {
            const double val_loss = metric_router_loss(result.params, data.val);
            result.val_losses.push_back(val_loss);
            if (val_loss < best_val - 1e-12) {
                best_val = val_loss;
                best = result.params;
                since_best = 0;
            } else if (++since_best >= config.patience) {
                result.params = best;
                return result;
            }
        }
    }
    if (!data.val.empty()) result.params = best;
    return result;
}

std::string MetricRouterParams::to_json_text() const {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["arch"] = "metric";
    doc["d_in"] = d_in;
    doc["d_latent"] = d_latent;
    doc["hidden"] = hidden;
    doc["model_ids"] = model_ids;
    doc["normstats_hash"] = normstats_hash;
    doc["embedder"] = {{"type", embedder.type}, {"dim", embedder.dim}, {"seed", embedder.seed}};
    doc["proj"] = nn::mlp_to_json(proj);
    doc["regressors"] = nlohmann::json::array();
    for (const auto& r : regressors) doc["regressors"].push_back(nn::mlp_to_json(r));
    return doc.dump() + "\n";
}

MetricRouterParams MetricRouterParams::from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.value("arch", "") != std::string("metric"))
        throw RouterError("snapshot arch is not 'metric'");
    MetricRouterParams params;
    params.d_in = doc.at("d_in").get<std::size_t>();
    params.d_latent = doc.at("d_latent").get<std::size_t>();
    params.hidden = doc.at("hidden").get<std::size_t>();
    params.model_ids = doc.at("model_ids").get<std::vector<std::string>>();
    params.normstats_hash = doc.value("normstats_hash", std::string{});
    if (doc.contains("embedder")) {
        params.embedder.type = doc["embedder"].value("type", std::string{"hash_projection"});
        params.embedder.dim = doc["embedder"].value("dim", std::size_t{64});
        params.embedder.seed = doc["embedder"].value("seed", std::uint64_t{1});
    }
    params.proj = nn::mlp_from_json(doc.at("proj"));
    for (const auto& r : doc.at("regressors"))
        params.regressors.push_back(nn::mlp_from_json(r));
    if (params.regressors.size() != params.model_ids.size() * router::kMetricsPerModel)
        throw RouterError("snapshot regressor bank size mismatch");
    return params;
}

void MetricRouterParams::save(const std::string& path) const {
    write_text_file(path, to_json_text());
}

MetricRouterParams MetricRouterParams::load(const std::string& path) {
    return from_json_text(read_text_file(path));
}

router::InferResult metric_router_infer(const MetricRouterParams& params,
                                        const std::vector<double>& query_embedding,
                                        const catalog::PreferenceWeights& mu) {
    router::InferResult result;
    std::vector<double> e;
    params.proj.forward(query_embedding, e);
    std::vector<double> out;
    for (std::size_t m = 0; m < params.model_count(); ++m) {
        catalog::MetricPair pair;
        for (std::size_t h = 0; h < router::kMetricsPerModel; ++h) {
            params.regressors[m * router::kMetricsPerModel + h].forward(e, out);
            if (h == 0)
                pair.perf_norm = nn::sigmoid(out[0]);
            else
                pair.cost_norm = nn::sigmoid(out[0]);
        }
        result.per_model[params.model_ids[m]] = pair;
    }
    result.model_id = catalog::select_best(mu, result.per_model);
    return result;
}

}  // namespace trouter::baselines
