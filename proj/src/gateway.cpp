#include "trouter/gateway.hpp"

#include <httplib.h>
#include <json.hpp>

namespace trouter::gateway {

using nlohmann::json;

std::shared_ptr<const Snapshot> Snapshot::from_file(const std::string& path) {
    auto snapshot = std::make_shared<Snapshot>();
    snapshot->params = router::RouterParams::load(path);
    snapshot->embedder = router::make_embedder(snapshot->params.embedder);
    if (snapshot->embedder->dim() != snapshot->params.config.d_in)
        throw RouterError("snapshot embedder dimension does not match router input");
    snapshot->hash = snapshot->params.snapshot_hash();
    return snapshot;
}

class RouterService::Impl {
public:
    explicit Impl(GatewayConfig config) : config_(std::move(config)) {
        if (config_.proxy_enabled && config_.proxy.base_url.empty())
            throw RouterError("proxy execution enabled without a backend base_url");
        set_snapshot(Snapshot::from_file(config_.snapshot_path));
        if (config_.pool_path) pool_ = catalog::ModelPool::load(*config_.pool_path);
        install_routes();
    }

    int bind() {
        if (bound_port_ >= 0) return bound_port_;
        if (config_.port == 0) {
            bound_port_ = server_.bind_to_any_port(config_.host);
            if (bound_port_ < 0) throw RouterError("cannot bind to any port on " + config_.host);
        } else {
            if (!server_.bind_to_port(config_.host, config_.port))
                throw RouterError("cannot bind " + config_.host + ":" +
                                  std::to_string(config_.port));
            bound_port_ = config_.port;
        }
        return bound_port_;
    }

    void run() {
        bind();
        server_.listen_after_bind();
    }

    void stop() { server_.stop(); }

    void set_snapshot(std::shared_ptr<const Snapshot> snapshot) {
        std::lock_guard<std::mutex> lock(snapshot_mutex_);
        snapshot_ = std::move(snapshot);
    }

    std::shared_ptr<const Snapshot> snapshot() const {
        std::lock_guard<std::mutex> lock(snapshot_mutex_);
        return snapshot_;
    }

    void reload(const std::string& path) { set_snapshot(Snapshot::from_file(path)); }

private:
    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    void install_routes() {
        server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
            auto snap = snapshot();
            if (!snap) {
                reply(res, 503, {{"status", "unavailable"}});
                return;
            }
            reply(res, 200,
                  {{"status", "ok"},
                   {"snapshot_hash", snap->hash},
                   {"taxonomy_hash", snap->params.taxonomy_hash},
                   {"normstats_hash", snap->params.normstats_hash}});
        });

        server_.Get("/models", [this](const httplib::Request&, httplib::Response& res) {
            auto snap = snapshot();
            if (!snap) {
                reply(res, 503, {{"status", "unavailable"}});
                return;
            }
            json models = json::array();
            for (const auto& id : snap->params.model_ids) {
                json entry{{"model_id", id}};
                if (pool_ && pool_->contains(id)) {
                    const auto& spec = pool_->by_id(id);
                    entry["family"] = spec.family;
                    if (spec.size_label) entry["size_label"] = *spec.size_label;
                    entry["input_price"] = spec.input_price;
                    entry["output_price"] = spec.output_price;
                }
                models.push_back(std::move(entry));
            }
            reply(res, 200, {{"models", std::move(models)}});
        });

        server_.Post("/route", [this](const httplib::Request& req, httplib::Response& res) {
            auto snap = snapshot();
            if (!snap) {
                reply(res, 503, {{"error", "no snapshot loaded"}});
                return;
            }
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::exception&) {
                reply(res, 400, {{"error", "request body is not valid JSON"}});
                return;
            }
            if (!body.contains("query") || !body["query"].is_string() ||
                !body.contains("mu_r") || !body["mu_r"].is_number()) {
                reply(res, 400, {{"error", "body needs string 'query' and numeric 'mu_r'"}});
                return;
            }
            const double mu_r = body["mu_r"].get<double>();
            if (mu_r < 0.0 || mu_r > 1.0) {
                reply(res, 400, {{"error", "mu_r must lie in [0, 1]"}});
                return;
            }
            const std::string query = body["query"].get<std::string>();
            try {
                const auto mu = catalog::PreferenceWeights::from_mu_r(mu_r);
                const auto embedding = snap->embedder->embed(query);
                const auto result = router::infer(snap->params, embedding, mu);

                json per_model = json::array();
                for (const auto& [id, pair] : result.per_model)
                    per_model.push_back({{"model_id", id},
                                         {"perf", pair.perf_norm},
                                         {"cost", pair.cost_norm},
                                         {"utility",
                                          catalog::utility(mu, pair.perf_norm, pair.cost_norm)}});
                json topk = json::array();
                for (const auto& [profile_id, prob] :
                     router::posterior_topk(snap->params, result.posterior, 5))
                    topk.push_back({{"profile_id", profile_id}, {"probability", prob}});

                json out{{"schema_version", 1},
                         {"model_id", result.model_id},
                         {"mu_r", mu.mu_r()},
                         {"mu_c", mu.mu_c()},
                         {"per_model", std::move(per_model)},
                         {"posterior_topk", std::move(topk)},
                         {"snapshot_hash", snap->hash}};
                if (config_.proxy_enabled) out["response_text"] = proxy_execute(result.model_id, query);
                reply(res, 200, out);
            } catch (const std::exception& e) {
                reply(res, 500, {{"error", e.what()}});
            }
        });

        server_.Post("/reload", [this](const httplib::Request& req, httplib::Response& res) {
            std::string path = config_.snapshot_path;
            if (!req.body.empty()) {
                try {
                    json body = json::parse(req.body);
                    if (body.contains("snapshot")) path = body["snapshot"].get<std::string>();
                } catch (const json::exception&) {
                    reply(res, 400, {{"error", "request body is not valid JSON"}});
                    return;
                }
            }
            try {
                reload(path);
                reply(res, 200, {{"status", "ok"}, {"snapshot_hash", snapshot()->hash}});
            } catch (const std::exception& e) {
                reply(res, 500, {{"error", e.what()}});
            }
        });
    }

    std::string proxy_execute(const std::string& model_id, const std::string& query) {
        gen::HttpClientConfig backend = config_.proxy;
        backend.model = model_id;
        return gen::make_http_client(backend)->complete("", query).text;
    }

    GatewayConfig config_;
    std::optional<catalog::ModelPool> pool_;
    httplib::Server server_;
    int bound_port_ = -1;

    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
};

RouterService::RouterService(GatewayConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

RouterService::~RouterService() = default;

int RouterService::bind() { return impl_->bind(); }
void RouterService::run() { impl_->run(); }
void RouterService::stop() { impl_->stop(); }
void RouterService::reload(const std::string& snapshot_path) { impl_->reload(snapshot_path); }

std::shared_ptr<const Snapshot> RouterService::current_snapshot() const {
    return impl_->snapshot();
}

}  // namespace trouter::gateway
