#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include <functional>
#include <mutex>

#include "trouter/common.hpp"
#include "trouter/genclient.hpp"
#include "trouter/router.hpp"
#include "trouter/taxonomy.hpp"

#ifndef TROUTER_GOLDEN_DIR
#define TROUTER_GOLDEN_DIR "golden"
#endif
#ifndef TROUTER_DATA_DIR
#define TROUTER_DATA_DIR "data"
#endif

namespace testsupport {

/// GenClient backed by a function of the user prompt; for mocks that need to
/// react to prompt content or keep call-order state. Locked, since collect()
/// may call concurrently.
class CallbackClient : public trouter::gen::GenClient {
public:
    using Fn = std::function<std::string(const std::string&)>;
    explicit CallbackClient(Fn fn, trouter::catalog::UsageRecord usage = {10, 10})
        : fn_(std::move(fn)), usage_(usage) {}

    trouter::gen::Completion complete(const std::string&, const std::string& user) override {
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        return {fn_(user), usage_};
    }

    int calls() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return calls_;
    }

private:
    mutable std::mutex mutex_;
    Fn fn_;
    trouter::catalog::UsageRecord usage_;
    int calls_ = 0;
};

inline std::string golden(const std::string& name) {
    return trouter::read_text_file(std::string(TROUTER_GOLDEN_DIR) + "/" + name);
}

inline std::string data_path(const std::string& name) {
    return std::string(TROUTER_DATA_DIR) + "/" + name;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("trouter_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Mathematics / Arithmetic / {Easy, Medium, Hard}; definitions match the
/// golden prompt fixtures.
inline trouter::taxonomy::Taxonomy toy_taxonomy() {
    using trouter::taxonomy::Level;
    using trouter::taxonomy::TaskNode;

    TaskNode easy{Level::Difficulty, "Easy",
                  "Single-step addition or subtraction of small integers.",
                  "What is 7 plus 5?", {}};
    TaskNode medium{Level::Difficulty, "Medium",
                    "Multi-step arithmetic with mixed operations.",
                    "What is (14 - 5) * 3?", {}};
    TaskNode hard{Level::Difficulty, "Hard",
                  "Arithmetic word problems requiring several derived quantities.",
                  "A tank loses 3 liters per hour for 7 hours, then gains 5; what changed?", {}};

    TaskNode arithmetic{
        Level::Subcategory, "Arithmetic",
        "Covers basic arithmetic operations and problem-solving involving numbers, including "
        "addition, subtraction, multiplication, and division.",
        "What is the sum of 123 and 456?",
        {easy, medium, hard}};

    TaskNode mathematics{
        Level::Domain, "Mathematics",
        "Covers quantitative problem-solving tasks involving numbers, equations, logic, or "
        "formal systems, including arithmetic, algebra, calculus, and more.",
        "What is the derivative of sin(x)?",
        {arithmetic}};

    return trouter::taxonomy::Taxonomy({mathematics});
}

/// Independent re-implementation of the training objective for oracle
/// comparisons: plain loops, no shared code with the library's batch pass.
inline double reference_total_loss(const trouter::router::RouterParams& params,
                                   const std::vector<trouter::router::TrainExample>& batch) {
    using namespace trouter;

    auto linear = [](const nn::Linear& layer, const std::vector<double>& x) {
        std::vector<double> y(layer.out, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            y[o] = layer.b[o];
            for (std::size_t i = 0; i < layer.in; ++i) y[o] += layer.w[o * layer.in + i] * x[i];
        }
        return y;
    };
    auto mlp = [&](const nn::Mlp2& net, const std::vector<double>& x) {
        auto h = linear(net.l1, x);
        for (auto& v : h) v = v > 0.0 ? v : 0.0;
        return linear(net.l2, h);
    };

    const std::size_t K = params.task_count();
    const std::size_t M = params.model_count();

    std::vector<std::vector<double>> e_t;
    for (std::size_t i = 0; i < K; ++i) e_t.push_back(mlp(params.task_proj, params.task_inputs[i]));

    double ce_sum = 0.0;
    std::size_t labeled = 0;
    std::vector<double> mse_sum(M * 2, 0.0);

    for (const auto& ex : batch) {
        const auto e_q = mlp(params.query_proj, ex.query_input);
        std::vector<double> scores(K, 0.0);
        for (std::size_t i = 0; i < K; ++i) {
            std::vector<double> z(e_q);
            z.insert(z.end(), e_t[i].begin(), e_t[i].end());
            scores[i] = mlp(params.scorer, z)[0];
        }
        double max_s = scores[0];
        for (double s : scores) max_s = std::max(max_s, s);
        std::vector<double> l(K, 0.0);
        double z_sum = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            l[i] = std::exp((scores[i] - max_s) / params.config.tau);
            z_sum += l[i];
        }
        for (auto& v : l) v /= z_sum;

        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t h = 0; h < 2; ++h) {
                double pred = 0.0;
                for (std::size_t i = 0; i < K; ++i) {
                    const double raw = mlp(params.regressors[m * 2 + h], e_t[i])[0];
                    pred += l[i] / (1.0 + std::exp(-raw));
                }
                const double obs = h == 0 ? ex.perf[m] : ex.cost[m];
                mse_sum[m * 2 + h] += (pred - obs) * (pred - obs);
            }
        if (ex.label) {
            // log-space cross-entropy, matching the objective's definition
            ce_sum += std::log(z_sum) -
                      (scores[static_cast<std::size_t>(*ex.label)] - max_s) / params.config.tau;
            ++labeled;
        }
    }

    double loss = labeled ? ce_sum / static_cast<double>(labeled) : 0.0;
    double mse = 0.0;
    for (double v : mse_sum) mse += v / static_cast<double>(batch.size());
    return loss + mse / static_cast<double>(M * 2);
}

/// Random toy router instance for gradient and loss-oracle tests.
struct ToyInstance {
    trouter::router::RouterParams params;
    std::vector<trouter::router::TrainExample> batch;
};

inline ToyInstance make_toy_instance(std::uint64_t seed, std::size_t K = 3, std::size_t M = 2,
                                     std::size_t d_in = 8, std::size_t d_latent = 8,
                                     std::size_t hidden = 8, std::size_t batch_size = 3) {
    using namespace trouter;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    router::RouterConfig config;
    config.d_in = d_in;
    config.d_latent = d_latent;
    config.hidden = hidden;
    config.tau = 0.07;

    std::vector<std::string> model_ids;
    for (std::size_t m = 0; m < M; ++m) model_ids.push_back("model-" + std::to_string(m));
    std::vector<std::string> profile_ids;
    std::vector<std::vector<double>> task_inputs;
    for (std::size_t t = 0; t < K; ++t) {
        profile_ids.push_back("profile-" + std::to_string(t));
        std::vector<double> input(d_in);
        for (auto& v : input) v = normal(rng);
        task_inputs.push_back(std::move(input));
    }

    ToyInstance toy{router::RouterParams::create(config, model_ids, profile_ids, task_inputs,
                                                 seed ^ 0xabcdef),
                    {}};
    std::uniform_int_distribution<int> label_dist(0, static_cast<int>(K) - 1);
    for (std::size_t b = 0; b < batch_size; ++b) {
        router::TrainExample ex;
        ex.query_input.resize(d_in);
        for (auto& v : ex.query_input) v = normal(rng);
        ex.perf.resize(M);
        ex.cost.resize(M);
        for (std::size_t m = 0; m < M; ++m) {
            ex.perf[m] = uniform(rng);
            ex.cost[m] = uniform(rng);
        }
        if (b % 3 != 2) ex.label = label_dist(rng);  // every third example unlabeled
        toy.batch.push_back(std::move(ex));
    }
    return toy;
}

/// Central finite differences over every parameter tensor.
inline double max_gradient_rel_error(trouter::router::RouterParams& params,
                                     const std::vector<trouter::router::TrainExample>& batch,
                                     double step = 1e-5) {
    using namespace trouter;
    router::RouterGrads grads = router::RouterGrads::like(params);
    router::total_loss_and_grad(params, batch, grads);

    const auto param_refs = params.tensors();
    const auto grad_refs = grads.tensors();

    double worst = 0.0;
    for (std::size_t t = 0; t < param_refs.size(); ++t) {
        for (std::size_t j = 0; j < param_refs[t].size; ++j) {
            double& value = param_refs[t].data[j];
            const double saved = value;
            value = saved + step;
            const double up = router::total_loss(params, batch);
            value = saved - step;
            const double down = router::total_loss(params, batch);
            value = saved;
            const double fd = (up - down) / (2.0 * step);
            const double analytic = grad_refs[t].data[j];
            // The 1e-4 floor keeps central-difference rounding noise (~1e-10
            // absolute) from dominating the ratio on near-zero gradients; an
            // absolute error above 1e-8 still fails at the 1e-4 threshold.
            const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-4});
            worst = std::max(worst, std::abs(fd - analytic) / denom);
        }
    }
    return worst;
}

}  // namespace testsupport
