#include "trouter/embedding.hpp"

#include <cctype>
#include <cmath>

namespace trouter::embedding {

HashProjectionEmbedder::HashProjectionEmbedder(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw RouterError("embedding dimension must be positive");
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace

std::vector<double> HashProjectionEmbedder::embed(const std::string& text) {
    std::vector<double> vec(dim_, 0.0);
    auto add_feature = [&](const std::string& feature) {
        const std::uint64_t h = fnv1a64(feature, 0xcbf29ce484222325ull ^ seed_);
        const std::size_t bucket = static_cast<std::size_t>(h % dim_);
        vec[bucket] += (h >> 63) ? 1.0 : -1.0;
    };
    const auto tokens = tokenize(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add_feature(tokens[i]);
        if (i + 1 < tokens.size()) add_feature(tokens[i] + " " + tokens[i + 1]);
    }
    double norm = 0.0;
    for (double v : vec) norm += v * v;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : vec) v /= norm;
    }
    return vec;
}

std::vector<double> TableEmbedder::embed(const std::string& text) {
    auto it = table_.find(text);
    if (it == table_.end()) throw RouterError("no embedding recorded for text: " + text);
    return it->second;
}

void TableEmbedder::insert(const std::string& text, std::vector<double> vec) {
    if (vec.size() != dim_) throw RouterError("embedding dimension mismatch on insert");
    table_[text] = std::move(vec);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw RouterError("embedding dimension mismatch");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace trouter::embedding
