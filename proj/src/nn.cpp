#include "trouter/nn.hpp"

#include <algorithm>
#include <cmath>

namespace trouter::nn {

Linear::Linear(std::size_t in_dim, std::size_t out_dim)
    : in(in_dim), out(out_dim), w(in_dim * out_dim, 0.0), b(out_dim, 0.0) {}

void Linear::init(std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(in)));
    for (double& v : w) v = dist(rng);
    std::fill(b.begin(), b.end(), 0.0);
}

void Linear::zero() {
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
}

void Linear::forward(const std::vector<double>& x, std::vector<double>& y) const {
    if (x.size() != in) throw RouterError("linear forward: input dimension mismatch");
    y.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
        const double* row = w.data() + o * in;
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

void Linear::backward(const std::vector<double>& x, const std::vector<double>& dy, Linear& grad,
                      std::vector<double>* dx) const {
    for (std::size_t o = 0; o < out; ++o) {
        const double g = dy[o];
        if (g == 0.0) continue;
        double* grow = grad.w.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) grow[i] += g * x[i];
        grad.b[o] += g;
    }
    if (dx) {
        dx->assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double g = dy[o];
            if (g == 0.0) continue;
            const double* row = w.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) (*dx)[i] += g * row[i];
        }
    }
}

std::vector<TensorRef> Linear::tensors() {
    return {{w.data(), w.size()}, {b.data(), b.size()}};
}

Mlp2::Mlp2(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim)
    : l1(in_dim, hidden_dim), l2(hidden_dim, out_dim) {}

void Mlp2::init(std::mt19937_64& rng) {
    l1.init(rng);
    l2.init(rng);
}

void Mlp2::zero() {
    l1.zero();
    l2.zero();
}

void Mlp2::forward(const std::vector<double>& x, std::vector<double>& y, Cache* cache) const {
    std::vector<double> a1;
    l1.forward(x, a1);
    std::vector<double> h1 = a1;
    for (double& v : h1) v = std::max(0.0, v);
    l2.forward(h1, y);
    if (cache) {
        cache->x = x;
        cache->a1 = std::move(a1);
        cache->h1 = std::move(h1);
    }
}

void Mlp2::backward(const Cache& cache, const std::vector<double>& dy, Mlp2& grad,
                    std::vector<double>* dx) const {
    std::vector<double> dh1;
    l2.backward(cache.h1, dy, grad.l2, &dh1);
    for (std::size_t i = 0; i < dh1.size(); ++i)
        if (cache.a1[i] <= 0.0) dh1[i] = 0.0;
    l1.backward(cache.x, dh1, grad.l1, dx);
}

std::vector<TensorRef> Mlp2::tensors() {
    auto t1 = l1.tensors();
    auto t2 = l2.tensors();
    t1.insert(t1.end(), t2.begin(), t2.end());
    return t1;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> softmax(const std::vector<double>& scores, double tau) {
    if (scores.empty()) throw RouterError("softmax on empty scores");
    if (tau <= 0.0) throw RouterError("softmax temperature must be positive");
    double max_score = scores[0];
    for (double s : scores) {
        if (!std::isfinite(s)) throw RouterError("non-finite score in softmax");
        max_score = std::max(max_score, s);
    }
    std::vector<double> probs(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp((scores[i] - max_score) / tau);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

std::vector<double> softmax_backward(const std::vector<double>& probs,
                                     const std::vector<double>& dprobs, double tau) {
    double mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) mean += probs[i] * dprobs[i];
    std::vector<double> dscores(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        dscores[i] = probs[i] * (dprobs[i] - mean) / tau;
    return dscores;
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads) {
    if (params.size() != grads.size()) throw RouterError("adam: tensor list mismatch");
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(params[i].size, 0.0);
            v_[i].assign(params[i].size, 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size != grads[i].size || m_[i].size() != params[i].size)
            throw RouterError("adam: tensor shape changed between steps");
        double* p = params[i].data;
        const double* g = grads[i].data;
        for (std::size_t j = 0; j < params[i].size; ++j) {
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g[j];
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g[j] * g[j];
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            p[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace trouter::nn

#include "trouter/nn_serialize.hpp"

namespace trouter::nn {

nlohmann::json linear_to_json(const Linear& layer) {
    return nlohmann::json{{"in", layer.in}, {"out", layer.out}, {"w", layer.w}, {"b", layer.b}};
}

Linear linear_from_json(const nlohmann::json& doc) {
    Linear layer(doc.at("in").get<std::size_t>(), doc.at("out").get<std::size_t>());
    layer.w = doc.at("w").get<std::vector<double>>();
    layer.b = doc.at("b").get<std::vector<double>>();
    if (layer.w.size() != layer.in * layer.out || layer.b.size() != layer.out)
        throw RouterError("serialized layer shape mismatch");
    return layer;
}

nlohmann::json mlp_to_json(const Mlp2& mlp) {
    return nlohmann::json{{"l1", linear_to_json(mlp.l1)}, {"l2", linear_to_json(mlp.l2)}};
}

Mlp2 mlp_from_json(const nlohmann::json& doc) {
    Mlp2 mlp;
    mlp.l1 = linear_from_json(doc.at("l1"));
    mlp.l2 = linear_from_json(doc.at("l2"));
    return mlp;
}

}  // namespace trouter::nn
