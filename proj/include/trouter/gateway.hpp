#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "trouter/catalog.hpp"
#include "trouter/embedding.hpp"
#include "trouter/genclient.hpp"
#include "trouter/router.hpp"

namespace trouter::gateway {

struct GatewayConfig {
    std::string snapshot_path;
    std::optional<std::string> pool_path;  // enriches /models with pricing
    std::string host = "127.0.0.1";
    int port = 8080;
    bool proxy_enabled = false;  // off by default: the core contract is selection
    gen::HttpClientConfig proxy;  // backend used when proxy_enabled
};

/// Immutable serving state: params plus the embedder that reproduces the
/// training-time query vectors. Swapped as a unit on reload.
struct Snapshot {
    router::RouterParams params;
    std::unique_ptr<embedding::EmbeddingProvider> embedder;
    std::string hash;

    static std::shared_ptr<const Snapshot> from_file(const std::string& path);
};

/// HTTP routing service. Endpoints: POST /route, GET /models, GET /healthz,
/// POST /reload. Requests are stateless over a shared immutable snapshot;
/// reload swaps the snapshot pointer atomically so every request sees
/// exactly one snapshot.
class RouterService {
public:
    explicit RouterService(GatewayConfig config);
    ~RouterService();

    RouterService(const RouterService&) = delete;
    RouterService& operator=(const RouterService&) = delete;

    /// Binds to config.port (or an ephemeral port when 0) and returns the
    /// bound port without serving yet.
    int bind();
    /// Serves until stop(); call bind() first (run() binds otherwise).
    void run();
    void stop();

    void reload(const std::string& snapshot_path);
    std::shared_ptr<const Snapshot> current_snapshot() const;

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace trouter::gateway
