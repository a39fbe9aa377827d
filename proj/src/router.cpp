#include "trouter/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "trouter/nn_serialize.hpp"

namespace trouter::router {

using nlohmann::json;

namespace {
constexpr double kLogEps = 1e-12;
}

std::unique_ptr<embedding::EmbeddingProvider> make_embedder(const EmbedderSpec& spec) {
    if (spec.type == "hash_projection")
        return std::make_unique<embedding::HashProjectionEmbedder>(spec.dim, spec.seed);
    throw RouterError("no constructible embedder of type '" + spec.type +
                      "'; query embeddings must be supplied externally");
}

RouterParams RouterParams::create(RouterConfig config, std::vector<std::string> model_ids,
                                  std::vector<std::string> profile_ids,
                                  std::vector<std::vector<double>> task_inputs,
                                  std::uint64_t seed) {
    if (config.d_in == 0 || config.d_latent == 0 || config.hidden == 0)
        throw RouterError("router dimensions must be positive");
    if (config.tau <= 0.0) throw RouterError("temperature must be positive");
    if (model_ids.empty()) throw RouterError("router needs at least one model");
    if (profile_ids.empty()) throw RouterError("router needs at least one task type");
    if (task_inputs.size() != profile_ids.size())
        throw RouterError("task input count must match profile count");
    for (const auto& t : task_inputs)
        if (t.size() != config.d_in) throw RouterError("task input dimension mismatch");

    RouterParams params;
    params.config = config;
    params.model_ids = std::move(model_ids);
    params.profile_ids = std::move(profile_ids);
    params.task_inputs = std::move(task_inputs);

    std::mt19937_64 rng(seed);
    params.query_proj = nn::Mlp2(config.d_in, config.hidden, config.d_latent);
    params.query_proj.init(rng);
    params.task_proj = nn::Mlp2(config.d_in, config.hidden, config.d_latent);
    params.task_proj.init(rng);
    params.scorer = nn::Mlp2(2 * config.d_latent, config.hidden, 1);
    params.scorer.init(rng);
    params.regressors.reserve(params.model_ids.size() * kMetricsPerModel);
    for (std::size_t i = 0; i < params.model_ids.size() * kMetricsPerModel; ++i) {
        params.regressors.emplace_back(config.d_latent, config.hidden, 1);
        params.regressors.back().init(rng);
    }
    return params;
}

std::size_t RouterParams::model_index(const std::string& model_id) const {
    for (std::size_t i = 0; i < model_ids.size(); ++i)
        if (model_ids[i] == model_id) return i;
    throw RouterError("unknown model: " + model_id);
}

nn::Mlp2& RouterParams::regressor(std::size_t model, Metric metric) {
    return regressors.at(model * kMetricsPerModel + static_cast<std::size_t>(metric));
}

const nn::Mlp2& RouterParams::regressor(std::size_t model, Metric metric) const {
    return regressors.at(model * kMetricsPerModel + static_cast<std::size_t>(metric));
}

std::vector<nn::TensorRef> RouterParams::tensors() {
    std::vector<nn::TensorRef> refs = query_proj.tensors();
    auto append = [&refs](std::vector<nn::TensorRef> more) {
        refs.insert(refs.end(), more.begin(), more.end());
    };
    append(task_proj.tensors());
    append(scorer.tensors());
    for (auto& r : regressors) append(r.tensors());
    return refs;
}

RouterGrads RouterGrads::like(const RouterParams& params) {
    RouterGrads grads;
    grads.query_proj = nn::Mlp2(params.config.d_in, params.config.hidden, params.config.d_latent);
    grads.task_proj = nn::Mlp2(params.config.d_in, params.config.hidden, params.config.d_latent);
    grads.scorer = nn::Mlp2(2 * params.config.d_latent, params.config.hidden, 1);
    grads.regressors.assign(params.regressors.size(),
                            nn::Mlp2(params.config.d_latent, params.config.hidden, 1));
    return grads;
}

void RouterGrads::zero() {
    query_proj.zero();
    task_proj.zero();
    scorer.zero();
    for (auto& r : regressors) r.zero();
}

std::vector<nn::TensorRef> RouterGrads::tensors() {
    std::vector<nn::TensorRef> refs = query_proj.tensors();
    auto append = [&refs](std::vector<nn::TensorRef> more) {
        refs.insert(refs.end(), more.begin(), more.end());
    };
    append(task_proj.tensors());
    append(scorer.tensors());
    for (auto& r : regressors) append(r.tensors());
    return refs;
}

namespace {

std::vector<double> recognition_scores(const RouterParams& params,
                                       const std::vector<double>& e_q,
                                       const std::vector<std::vector<double>>& e_t,
                                       std::vector<nn::Mlp2::Cache>* caches) {
    const std::size_t latent = params.config.d_latent;
    std::vector<double> scores(e_t.size(), 0.0);
    std::vector<double> z(2 * latent);
    std::vector<double> out;
    for (std::size_t i = 0; i < e_t.size(); ++i) {
        std::copy(e_q.begin(), e_q.end(), z.begin());
        std::copy(e_t[i].begin(), e_t[i].end(), z.begin() + static_cast<std::ptrdiff_t>(latent));
        params.scorer.forward(z, out, caches ? &(*caches)[i] : nullptr);
        scores[i] = out[0];
    }
    return scores;
}

std::vector<std::vector<double>> project_tasks(const RouterParams& params,
                                               std::vector<nn::Mlp2::Cache>* caches) {
    std::vector<std::vector<double>> e_t(params.task_count());
    for (std::size_t i = 0; i < params.task_count(); ++i)
        params.task_proj.forward(params.task_inputs[i], e_t[i],
                                 caches ? &(*caches)[i] : nullptr);
    return e_t;
}

}  // namespace

TaskPosterior recognize(const RouterParams& params, const std::vector<double>& query_embedding) {
    if (query_embedding.size() != params.config.d_in)
        throw RouterError("query embedding dimension mismatch");
    std::vector<double> e_q;
    params.query_proj.forward(query_embedding, e_q);
    const auto e_t = project_tasks(params, nullptr);
    const auto scores = recognition_scores(params, e_q, e_t, nullptr);
    return TaskPosterior{nn::softmax(scores, params.config.tau)};
}

double predict_metric(const RouterParams& params, const TaskPosterior& posterior,
                      const std::string& model_id, Metric metric) {
    if (posterior.l.size() != params.task_count())
        throw RouterError("posterior length does not match task count");
    const nn::Mlp2& head = params.regressor(params.model_index(model_id), metric);
    const auto e_t = project_tasks(params, nullptr);
    double prediction = 0.0;
    std::vector<double> out;
    for (std::size_t i = 0; i < e_t.size(); ++i) {
        head.forward(e_t[i], out);
        prediction += posterior.l[i] * nn::sigmoid(out[0]);
    }
    return prediction;
}

double ce_loss(const std::vector<double>& posterior, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= posterior.size())
        throw RouterError("label out of range");
    return -std::log(std::max(posterior[static_cast<std::size_t>(label)], kLogEps));
}

double mse_loss(double predicted, double observed) {
    const double d = predicted - observed;
    return d * d;
}

namespace {

/// Shared forward/backward core. Gradients are computed when `grads` is
/// non-null. Task projections and regressor outputs do not depend on the
/// query, so they are evaluated once per batch.
double batch_pass(const RouterParams& params, const std::vector<TrainExample>& batch,
                  RouterGrads* grads) {
    if (batch.empty()) throw RouterError("empty batch");
    const std::size_t K = params.task_count();
    const std::size_t M = params.model_count();
    const std::size_t heads = M * kMetricsPerModel;
    const std::size_t latent = params.config.d_latent;
    const double batch_size = static_cast<double>(batch.size());

    std::size_t labeled = 0;
    for (const auto& ex : batch) {
        if (ex.query_input.size() != params.config.d_in)
            throw RouterError("query input dimension mismatch");
        if (ex.perf.size() != M || ex.cost.size() != M)
            throw RouterError("example metric vectors must cover every model");
        if (ex.label) {
            if (*ex.label < 0 || static_cast<std::size_t>(*ex.label) >= K)
                throw RouterError("label out of range");
            ++labeled;
        }
    }

    std::vector<nn::Mlp2::Cache> task_caches(grads ? K : 0);
    const auto e_t = project_tasks(params, grads ? &task_caches : nullptr);

    // head_out[j][i] = sigmoid(regressor_j(e_t_i))
    std::vector<std::vector<double>> head_out(heads, std::vector<double>(K, 0.0));
    std::vector<std::vector<nn::Mlp2::Cache>> head_caches(
        grads ? heads : 0, std::vector<nn::Mlp2::Cache>(grads ? K : 0));
    {
        std::vector<double> out;
        for (std::size_t j = 0; j < heads; ++j)
            for (std::size_t i = 0; i < K; ++i) {
                params.regressors[j].forward(e_t[i], out,
                                             grads ? &head_caches[j][i] : nullptr);
                head_out[j][i] = nn::sigmoid(out[0]);
            }
    }

    std::vector<std::vector<double>> d_head(heads, std::vector<double>(K, 0.0));
    std::vector<std::vector<double>> d_e_t(K, std::vector<double>(latent, 0.0));

    double ce_sum = 0.0;
    std::vector<double> mse_sum(heads, 0.0);

    std::vector<nn::Mlp2::Cache> scorer_caches(K);
    nn::Mlp2::Cache query_cache;
    std::vector<double> e_q;
    std::vector<double> d_e_q(latent);
    std::vector<double> dz;

    for (const auto& ex : batch) {
        params.query_proj.forward(ex.query_input, e_q, grads ? &query_cache : nullptr);
        const auto scores =
            recognition_scores(params, e_q, e_t, grads ? &scorer_caches : nullptr);
        const auto l = nn::softmax(scores, params.config.tau);

        std::vector<double> dl(K, 0.0);
        for (std::size_t j = 0; j < heads; ++j) {
            const std::size_t m = j / kMetricsPerModel;
            const double observed =
                (j % kMetricsPerModel == 0) ? ex.perf[m] : ex.cost[m];
            double predicted = 0.0;
            for (std::size_t i = 0; i < K; ++i) predicted += l[i] * head_out[j][i];
            mse_sum[j] += mse_loss(predicted, observed);
            if (grads) {
                const double d_pred =
                    (predicted - observed) / (static_cast<double>(M) * batch_size);
                for (std::size_t i = 0; i < K; ++i) {
                    d_head[j][i] += d_pred * l[i];
                    dl[i] += d_pred * head_out[j][i];
                }
            }
        }
        if (ex.label) {
            // log-space cross entropy: -log softmax(s/tau)_y, stable down to
            // vanishing posterior mass, with the exact (l - y)/tau gradient
            const auto y = static_cast<std::size_t>(*ex.label);
            double max_score = scores[0];
            for (double s : scores) max_score = std::max(max_score, s);
            double z = 0.0;
            for (double s : scores) z += std::exp((s - max_score) / params.config.tau);
            ce_sum += std::log(z) - (scores[y] - max_score) / params.config.tau;
        }

        if (grads) {
            auto d_scores = nn::softmax_backward(l, dl, params.config.tau);
            if (ex.label) {
                const auto y = static_cast<std::size_t>(*ex.label);
                const double scale =
                    1.0 / (params.config.tau * static_cast<double>(labeled));
                for (std::size_t i = 0; i < K; ++i)
                    d_scores[i] += (l[i] - (i == y ? 1.0 : 0.0)) * scale;
            }
            std::fill(d_e_q.begin(), d_e_q.end(), 0.0);
            for (std::size_t i = 0; i < K; ++i) {
                if (d_scores[i] == 0.0) continue;
                params.scorer.backward(scorer_caches[i], {d_scores[i]}, grads->scorer, &dz);
                for (std::size_t d = 0; d < latent; ++d) {
                    d_e_q[d] += dz[d];
                    d_e_t[i][d] += dz[latent + d];
                }
            }
            params.query_proj.backward(query_cache, d_e_q, grads->query_proj, nullptr);
        }
    }

    if (grads) {
        std::vector<double> d_inp;
        for (std::size_t j = 0; j < heads; ++j)
            for (std::size_t i = 0; i < K; ++i) {
                const double g = d_head[j][i];
                if (g == 0.0) continue;
                const double p = head_out[j][i];
                params.regressors[j].backward(head_caches[j][i], {g * p * (1.0 - p)},
                                              grads->regressors[j], &d_inp);
                for (std::size_t d = 0; d < latent; ++d) d_e_t[i][d] += d_inp[d];
            }
        for (std::size_t i = 0; i < K; ++i)
            params.task_proj.backward(task_caches[i], d_e_t[i], grads->task_proj, nullptr);
    }

    double loss = labeled > 0 ? ce_sum / static_cast<double>(labeled) : 0.0;
    double mse_total = 0.0;
    for (double m : mse_sum) mse_total += m / batch_size;
    loss += mse_total / static_cast<double>(heads);
    if (!std::isfinite(loss)) throw RouterError("non-finite loss");
    return loss;
}

}  // namespace

double total_loss(const RouterParams& params, const std::vector<TrainExample>& batch) {
    return batch_pass(params, batch, nullptr);
}

double total_loss_and_grad(const RouterParams& params, const std::vector<TrainExample>& batch,
                           RouterGrads& grads) {
    grads.zero();
    return batch_pass(params, batch, &grads);
}

TrainingData build_training_data(const datakit::Corpus& corpus,
                                 const taxonomy::Taxonomy& taxonomy,
                                 const std::vector<std::string>& model_ids,
                                 embedding::EmbeddingProvider& embedder) {
    TrainingData data;
    data.model_ids = model_ids;
    data.d_in = embedder.dim();

    const auto profiles = taxonomy.flatten_difficulty();
    for (const auto& profile : profiles) {
        data.profile_ids.push_back(profile.profile_id);
        data.task_inputs.push_back(embedder.embed(profile.rendered_text));
    }

    std::map<std::string, std::size_t> model_pos;
    for (std::size_t i = 0; i < model_ids.size(); ++i) model_pos[model_ids[i]] = i;

    for (const auto& [query_id, indices] : corpus.by_query()) {
        const auto& first = corpus.records[indices.front()];
        if (first.split == datakit::Split::Test) continue;

        TrainExample example;
        example.perf.assign(model_ids.size(), 0.0);
        example.cost.assign(model_ids.size(), 0.0);
        std::set<std::size_t> seen;
        bool usable = true;
        for (std::size_t idx : indices) {
            const auto& record = corpus.records[idx];
            auto pos = model_pos.find(record.model_id);
            if (pos == model_pos.end() || !record.perf_norm || !record.cost_norm) {
                usable = false;
                break;
            }
            example.perf[pos->second] = *record.perf_norm;
            example.cost[pos->second] = *record.cost_norm;
            seen.insert(pos->second);
        }
        if (!usable || seen.size() != model_ids.size()) {
            ++data.skipped_incomplete;
            continue;
        }
        example.query_input = embedder.embed(first.query_text);
        if (first.task_index &&
            static_cast<std::size_t>(*first.task_index) < data.profile_ids.size())
            example.label = first.task_index;
        if (first.split == datakit::Split::Val)
            data.val.push_back(std::move(example));
        else
            data.train.push_back(std::move(example));
    }
    return data;
}

TrainResult train(const TrainingData& data, const RouterConfig& config,
                  const TrainConfig& train_config) {
    if (data.train.empty()) throw RouterError("empty training corpus");

    RouterConfig cfg = config;
    cfg.d_in = data.d_in;

    TrainResult result;
    result.params = RouterParams::create(cfg, data.model_ids, data.profile_ids, data.task_inputs,
                                         train_config.seed);
    RouterGrads grads = RouterGrads::like(result.params);
    nn::Adam adam(train_config.lr);
    const auto param_refs = result.params.tensors();
    const auto grad_refs = grads.tensors();

    std::mt19937_64 rng(train_config.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), 0);

    RouterParams best = result.params;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    const std::size_t batch_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(train_config.batch_size));

    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            std::vector<TrainExample> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i)
                batch.push_back(data.train[order[i]]);
            try {
                epoch_loss += total_loss_and_grad(result.params, batch, grads);
            } catch (const RouterError& e) {
                throw RouterError(std::string("training diverged at epoch ") +
                                  std::to_string(epoch) + ": " + e.what());
            }
            adam.step(param_refs, grad_refs);
            ++batches;
        }
        result.train_losses.push_back(epoch_loss / static_cast<double>(batches));

        if (!data.val.empty()) {
            const double val_loss = total_loss(result.params, data.val);
            result.val_losses.push_back(val_loss);
            if (val_loss < best_val - 1e-12) {
                best_val = val_loss;
                best = result.params;
                result.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= train_config.patience) {
                result.params = best;
                return result;
            }
        } else {
            result.best_epoch = epoch;
        }
    }
    if (!data.val.empty()) result.params = best;
    return result;
}

InferResult infer(const RouterParams& params, const std::vector<double>& query_embedding,
                  const catalog::PreferenceWeights& mu) {
    InferResult result;
    result.posterior = recognize(params, query_embedding);

    const auto e_t = project_tasks(params, nullptr);
    std::vector<double> out;
    for (std::size_t m = 0; m < params.model_count(); ++m) {
        catalog::MetricPair pair;
        for (std::size_t h = 0; h < kMetricsPerModel; ++h) {
            const nn::Mlp2& head = params.regressors[m * kMetricsPerModel + h];
            double prediction = 0.0;
            for (std::size_t i = 0; i < e_t.size(); ++i) {
                head.forward(e_t[i], out);
                prediction += result.posterior.l[i] * nn::sigmoid(out[0]);
            }
            if (h == 0)
                pair.perf_norm = prediction;
            else
                pair.cost_norm = prediction;
        }
        result.per_model[params.model_ids[m]] = pair;
    }
    result.model_id = catalog::select_best(mu, result.per_model);
    return result;
}

std::vector<std::pair<std::string, double>> posterior_topk(const RouterParams& params,
                                                           const TaskPosterior& posterior,
                                                           std::size_t k) {
    std::vector<std::size_t> order(posterior.l.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return posterior.l[a] > posterior.l[b];
    });
    std::vector<std::pair<std::string, double>> top;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
        top.emplace_back(params.profile_ids[order[i]], posterior.l[order[i]]);
    return top;
}

// --- snapshot serialization ---

namespace {

using nn::mlp_from_json;
using nn::mlp_to_json;

constexpr int kSnapshotVersion = 1;

}  // namespace

std::string RouterParams::to_json_text() const {
    json doc;
    doc["version"] = kSnapshotVersion;
    doc["arch"] = "trouter";
    doc["d_in"] = config.d_in;
    doc["d_latent"] = config.d_latent;
    doc["hidden"] = config.hidden;
    doc["tau"] = config.tau;
    doc["model_ids"] = model_ids;
    doc["profile_ids"] = profile_ids;
    doc["task_inputs"] = task_inputs;
    doc["taxonomy_hash"] = taxonomy_hash;
    doc["normstats_hash"] = normstats_hash;
    doc["embedder"] = {{"type", embedder.type}, {"dim", embedder.dim}, {"seed", embedder.seed}};
    doc["query_proj"] = mlp_to_json(query_proj);
    doc["task_proj"] = mlp_to_json(task_proj);
    doc["scorer"] = mlp_to_json(scorer);
    doc["regressors"] = json::array();
    for (const auto& r : regressors) doc["regressors"].push_back(mlp_to_json(r));
    return doc.dump() + "\n";
}

RouterParams RouterParams::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("version").get<int>() != kSnapshotVersion)
        throw RouterError("unsupported snapshot version");
    if (doc.value("arch", "trouter") != std::string("trouter"))
        throw RouterError("snapshot arch is not 'trouter'");
    RouterParams params;
    params.config.d_in = doc.at("d_in").get<std::size_t>();
    params.config.d_latent = doc.at("d_latent").get<std::size_t>();
    params.config.hidden = doc.at("hidden").get<std::size_t>();
    params.config.tau = doc.at("tau").get<double>();
    params.model_ids = doc.at("model_ids").get<std::vector<std::string>>();
    params.profile_ids = doc.at("profile_ids").get<std::vector<std::string>>();
    params.task_inputs = doc.at("task_inputs").get<std::vector<std::vector<double>>>();
    params.taxonomy_hash = doc.value("taxonomy_hash", std::string{});
    params.normstats_hash = doc.value("normstats_hash", std::string{});
    if (doc.contains("embedder")) {
        params.embedder.type = doc["embedder"].value("type", std::string{"hash_projection"});
        params.embedder.dim = doc["embedder"].value("dim", std::size_t{64});
        params.embedder.seed = doc["embedder"].value("seed", std::uint64_t{1});
    }
    params.query_proj = mlp_from_json(doc.at("query_proj"));
    params.task_proj = mlp_from_json(doc.at("task_proj"));
    params.scorer = mlp_from_json(doc.at("scorer"));
    for (const auto& r : doc.at("regressors")) params.regressors.push_back(mlp_from_json(r));
    if (params.regressors.size() != params.model_ids.size() * kMetricsPerModel)
        throw RouterError("snapshot regressor bank size mismatch");
    return params;
}

void RouterParams::save(const std::string& path) const { write_text_file(path, to_json_text()); }

RouterParams RouterParams::load(const std::string& path,
                                const std::optional<std::string>& expected_taxonomy_hash) {
    RouterParams params = from_json_text(read_text_file(path));
    if (expected_taxonomy_hash && params.taxonomy_hash != *expected_taxonomy_hash)
        throw RouterError("snapshot was trained against a different taxonomy (hash " +
                          params.taxonomy_hash + ", expected " + *expected_taxonomy_hash + ")");
    return params;
}

std::string RouterParams::snapshot_hash() const { return stable_hash(to_json_text()); }

// --- evidence-bound diagnostics ---

namespace {

void check_distribution(const std::vector<double>& p, const char* name) {
    if (p.empty()) throw RouterError(std::string(name) + " must be non-empty");
    double total = 0.0;
    for (double v : p) {
        if (v < 0.0) throw RouterError(std::string(name) + " has a negative entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw RouterError(std::string(name) + " does not sum to 1");
}

}  // namespace

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw RouterError("KL arguments differ in length");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

std::vector<double> exact_posterior(const ElboInstance& instance) {
    std::vector<double> posterior(instance.prior.size(), 0.0);
    double evidence = 0.0;
    for (std::size_t t = 0; t < instance.prior.size(); ++t) {
        posterior[t] = instance.prior[t] * instance.likelihood[t];
        evidence += posterior[t];
    }
    if (evidence <= 0.0) throw RouterError("instance has zero evidence");
    for (double& v : posterior) v /= evidence;
    return posterior;
}

ElboReport elbo_check(const ElboInstance& instance) {
    check_distribution(instance.prior, "prior");
    check_distribution(instance.variational, "variational distribution");
    if (instance.likelihood.size() != instance.prior.size() ||
        instance.variational.size() != instance.prior.size())
        throw RouterError("instance vectors differ in length");
    for (double v : instance.likelihood)
        if (v < 0.0) throw RouterError("likelihood has a negative entry");

    double evidence = 0.0;
    for (std::size_t t = 0; t < instance.prior.size(); ++t)
        evidence += instance.prior[t] * instance.likelihood[t];
    if (evidence <= 0.0) throw RouterError("instance has zero evidence");

    ElboReport report;
    report.log_likelihood = std::log(evidence);

    double reconstruction = 0.0;
    for (std::size_t t = 0; t < instance.prior.size(); ++t) {
        if (instance.variational[t] == 0.0) continue;
        if (instance.likelihood[t] == 0.0) {
            reconstruction = -std::numeric_limits<double>::infinity();
            break;
        }
        reconstruction += instance.variational[t] * std::log(instance.likelihood[t]);
    }
    report.elbo = reconstruction - kl_divergence(instance.variational, instance.prior);
    report.gap = report.log_likelihood - report.elbo;
    return report;
}

}  // namespace trouter::router
