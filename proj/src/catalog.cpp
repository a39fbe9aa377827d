#include "trouter/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace trouter::catalog {

using nlohmann::json;

void ModelSpec::validate() const {
    if (model_id.empty()) throw RouterError("model_id must be non-empty");
    if (input_price < 0.0 || output_price < 0.0)
        throw RouterError("negative price for model " + model_id);
}

PreferenceWeights::PreferenceWeights(double mu_r, double mu_c) : mu_r_(mu_r), mu_c_(mu_c) {
    if (mu_r < 0.0 || mu_c < 0.0)
        throw RouterError("preference weights must be non-negative");
    if (std::abs(mu_r + mu_c - 1.0) > 1e-9)
        throw RouterError("preference weights must sum to 1");
}

double compute_cost(const ModelSpec& model, const UsageRecord& usage) {
    return (static_cast<double>(usage.input_tokens) * model.input_price +
            static_cast<double>(usage.output_tokens) * model.output_price) /
           1e6;
}

double utility(const PreferenceWeights& mu, double perf_norm, double cost_norm) {
    return mu.mu_r() * perf_norm - mu.mu_c() * cost_norm;
}

std::string select_best(const PreferenceWeights& mu,
                        const std::map<std::string, MetricPair>& per_model) {
    if (per_model.empty()) throw RouterError("empty pool");
    const std::string* best_id = nullptr;
    double best_utility = 0.0;
    double best_cost = 0.0;
    for (const auto& [model_id, metrics] : per_model) {
        const double u = utility(mu, metrics.perf_norm, metrics.cost_norm);
        // Map iteration is already id-ordered, so a strict improvement test
        // realizes the documented tie-break: utility, then lower cost, then id.
        const bool better = best_id == nullptr || u > best_utility ||
                            (u == best_utility && metrics.cost_norm < best_cost);
        if (better) {
            best_id = &model_id;
            best_utility = u;
            best_cost = metrics.cost_norm;
        }
    }
    return *best_id;
}

ModelPool::ModelPool(std::vector<ModelSpec> models) : models_(std::move(models)) {
    if (models_.size() < 2) throw RouterError("model pool needs at least two models");
    std::set<std::string> ids;
    for (const auto& m : models_) {
        m.validate();
        if (!ids.insert(m.model_id).second)
            throw RouterError("duplicate model_id in pool: " + m.model_id);
    }
}

const ModelSpec& ModelPool::by_id(const std::string& model_id) const {
    for (const auto& m : models_)
        if (m.model_id == model_id) return m;
    throw RouterError("unknown model: " + model_id);
}

bool ModelPool::contains(const std::string& model_id) const {
    return std::any_of(models_.begin(), models_.end(),
                       [&](const ModelSpec& m) { return m.model_id == model_id; });
}

ModelPool ModelPool::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    std::vector<ModelSpec> models;
    for (const auto& entry : doc.at("models")) {
        ModelSpec spec;
        spec.model_id = entry.at("model_id").get<std::string>();
        spec.family = entry.value("family", std::string{});
        if (entry.contains("size_label") && !entry["size_label"].is_null())
            spec.size_label = entry["size_label"].get<std::string>();
        spec.input_price = entry.at("input_price").get<double>();
        spec.output_price = entry.at("output_price").get<double>();
        models.push_back(std::move(spec));
    }
    return ModelPool(std::move(models));
}

std::string ModelPool::to_json_text() const {
    json doc;
    doc["models"] = json::array();
    for (const auto& m : models_) {
        json entry;
        entry["model_id"] = m.model_id;
        entry["family"] = m.family;
        if (m.size_label) entry["size_label"] = *m.size_label;
        entry["input_price"] = m.input_price;
        entry["output_price"] = m.output_price;
        doc["models"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

ModelPool ModelPool::load(const std::string& path) {
    return from_json_text(read_text_file(path));
}

void ModelPool::save(const std::string& path) const {
    write_text_file(path, to_json_text());
}

}  // namespace trouter::catalog
