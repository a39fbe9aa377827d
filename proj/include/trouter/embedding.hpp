#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trouter/common.hpp"

namespace trouter::embedding {

/// Text-to-vector contract. embed() must be deterministic per text and the
/// dimension constant for the provider's lifetime.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual std::size_t dim() const = 0;
};

/// Seeded feature-hashing embedder: tokens and token bigrams hashed into
/// signed buckets, L2-normalized. Deterministic, offline, no model weights;
/// the stand-in encoder for tests and mock pipelines.
class HashProjectionEmbedder : public EmbeddingProvider {
public:
    explicit HashProjectionEmbedder(std::size_t dim = 64, std::uint64_t seed = 1);

    std::vector<double> embed(const std::string& text) override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Fixed lookup table; used where embeddings are part of a constructed
/// fixture (e.g. synthetic worlds with planted clusters).
class TableEmbedder : public EmbeddingProvider {
public:
    TableEmbedder(std::map<std::string, std::vector<double>> table, std::size_t dim)
        : table_(std::move(table)), dim_(dim) {}

    std::vector<double> embed(const std::string& text) override;
    std::size_t dim() const override { return dim_; }

    void insert(const std::string& text, std::vector<double> vec);

private:
    std::map<std::string, std::vector<double>> table_;
    std::size_t dim_;
};

/// Cosine similarity; zero vectors compare as 0. Throws on dimension mismatch.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace trouter::embedding
