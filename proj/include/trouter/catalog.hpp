#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trouter/common.hpp"

namespace trouter::catalog {

/// One candidate LLM: identity plus per-million-token pricing.
struct ModelSpec {
    std::string model_id;
    std::string family;
    std::optional<std::string> size_label;  // parameter count such as "14B"; absent for commercial models
    double input_price = 0.0;               // money per 10^6 input tokens
    double output_price = 0.0;              // money per 10^6 output tokens

    void validate() const;
};

/// User trade-off weights on the probability simplex: mu_r + mu_c = 1.
class PreferenceWeights {
public:
    PreferenceWeights(double mu_r, double mu_c);

    /// Convenience: mu_c is derived as 1 - mu_r.
    static PreferenceWeights from_mu_r(double mu_r) { return PreferenceWeights(mu_r, 1.0 - mu_r); }

    double mu_r() const { return mu_r_; }
    double mu_c() const { return mu_c_; }

private:
    double mu_r_;
    double mu_c_;
};

struct UsageRecord {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;

    UsageRecord& operator+=(const UsageRecord& other) {
        input_tokens += other.input_tokens;
        output_tokens += other.output_tokens;
        return *this;
    }
};

/// Token-priced cost: (in * input_price + out * output_price) / 10^6.
double compute_cost(const ModelSpec& model, const UsageRecord& usage);

/// mu_r * perf - mu_c * cost, both metrics normalized to [0, 1].
double utility(const PreferenceWeights& mu, double perf_norm, double cost_norm);

/// Normalized (perf, cost) pair for one model.
struct MetricPair {
    double perf_norm = 0.0;
    double cost_norm = 0.0;
};

/// Argmax of utility over the candidates. Ties broken by lower cost_norm,
/// then lexicographic model_id, so the result is deterministic.
/// Throws RouterError("empty pool") on an empty map.
std::string select_best(const PreferenceWeights& mu,
                        const std::map<std::string, MetricPair>& per_model);

/// A loaded model pool. Enforces unique ids and at least two models; the
/// free-standing policy functions accept arbitrary spans instead.
class ModelPool {
public:
    explicit ModelPool(std::vector<ModelSpec> models);

    const std::vector<ModelSpec>& models() const { return models_; }
    const ModelSpec& by_id(const std::string& model_id) const;
    bool contains(const std::string& model_id) const;
    std::size_t size() const { return models_.size(); }

    static ModelPool load(const std::string& path);
    void save(const std::string& path) const;

    static ModelPool from_json_text(const std::string& text);
    std::string to_json_text() const;

private:
    std::vector<ModelSpec> models_;
};

}  // namespace trouter::catalog
