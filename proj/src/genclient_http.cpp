#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "trouter/genclient.hpp"

namespace trouter::gen {

using nlohmann::json;

namespace {

class HttpGenClient : public GenClient {
public:
    explicit HttpGenClient(HttpClientConfig config) : config_(std::move(config)) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        api_key_ = key ? key : "";
    }

    Completion complete(const std::string& system_prompt, const std::string& user_prompt) override {
        httplib::Client client(config_.base_url);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        json body;
        body["model"] = config_.model;
        body["messages"] = json::array();
        if (!system_prompt.empty())
            body["messages"].push_back({{"role", "system"}, {"content", system_prompt}});
        body["messages"].push_back({{"role", "user"}, {"content", user_prompt}});

        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res) throw RouterError("generation request failed: no response from " + config_.base_url);
        if (res->status != 200)
            throw RouterError("generation request failed: HTTP " + std::to_string(res->status));

        json reply = json::parse(res->body);
        Completion out;
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("usage")) {
            out.usage.input_tokens = reply["usage"].value("prompt_tokens", 0ull);
            out.usage.output_tokens = reply["usage"].value("completion_tokens", 0ull);
        } else {
            // Providers that omit usage: fall back to a length heuristic so
            // cost accounting stays defined.
            out.usage.input_tokens = (system_prompt.size() + user_prompt.size()) / 4;
            out.usage.output_tokens = out.text.size() / 4;
        }
        return out;
    }

private:
    HttpClientConfig config_;
    std::string api_key_;
};

}  // namespace

std::unique_ptr<GenClient> make_http_client(const HttpClientConfig& config) {
    return std::make_unique<HttpGenClient>(config);
}

}  // namespace trouter::gen
