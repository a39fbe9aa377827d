#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "trouter/common.hpp"

namespace trouter::nn {

/// Flat view over one parameter (or gradient) tensor.
struct TensorRef {
    double* data;
    std::size_t size;
};

/// Dense layer, weights row-major (out x in).
struct Linear {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;

    Linear() = default;
    Linear(std::size_t in_dim, std::size_t out_dim);

    void init(std::mt19937_64& rng);  // He-scaled normal draws
    void zero();

    void forward(const std::vector<double>& x, std::vector<double>& y) const;

    /// Accumulates dW/db into `grad` and writes the input gradient to dx
    /// (when non-null). `x` must be the forward input.
    void backward(const std::vector<double>& x, const std::vector<double>& dy, Linear& grad,
                  std::vector<double>* dx) const;

    std::vector<TensorRef> tensors();
};

/// Two-layer perceptron: linear -> ReLU -> linear.
struct Mlp2 {
    Linear l1;
    Linear l2;

    Mlp2() = default;
    Mlp2(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim);

    void init(std::mt19937_64& rng);
    void zero();

    struct Cache {
        std::vector<double> x;   // forward input
        std::vector<double> a1;  // pre-activation
        std::vector<double> h1;  // post-ReLU
    };

    void forward(const std::vector<double>& x, std::vector<double>& y, Cache* cache = nullptr) const;
    void backward(const Cache& cache, const std::vector<double>& dy, Mlp2& grad,
                  std::vector<double>* dx) const;

    std::vector<TensorRef> tensors();
};

double sigmoid(double x);

/// Numerically stabilized softmax of scores / tau. Throws on non-finite
/// scores.
std::vector<double> softmax(const std::vector<double>& scores, double tau);

/// Gradient of a loss through `probs = softmax(scores / tau)`:
/// ds_k = (1/tau) * p_k * (g_k - sum_i p_i g_i).
std::vector<double> softmax_backward(const std::vector<double>& probs,
                                     const std::vector<double>& dprobs, double tau);

/// Adam over an arbitrary tensor list; the list layout must stay identical
/// across steps.
class Adam {
public:
    Adam(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads);

private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace trouter::nn
