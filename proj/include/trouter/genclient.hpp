#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trouter/catalog.hpp"
#include "trouter/common.hpp"

namespace trouter::gen {

struct Completion {
    std::string text;
    catalog::UsageRecord usage;
};

/// Text-generation backend contract. Every call reports token usage so the
/// pipeline can account for synthesis cost. Implementations must tolerate
/// concurrent complete() calls.
class GenClient {
public:
    virtual ~GenClient() = default;
    virtual Completion complete(const std::string& system_prompt,
                                const std::string& user_prompt) = 0;
};

/// Key under which a (system, user) prompt pair is stored in a transcript.
std::string transcript_key(const std::string& system_prompt, const std::string& user_prompt);

/// An offline transcript: prompt-hash -> canned completion. Serves as both
/// recording (tests write fixtures) and replay storage.
class Transcript {
public:
    void add(const std::string& system_prompt, const std::string& user_prompt,
             const std::string& text, catalog::UsageRecord usage);
    void add_keyed(const std::string& key, const std::string& text, catalog::UsageRecord usage);

    bool contains(const std::string& key) const { return entries_.count(key) > 0; }
    std::size_t size() const { return entries_.size(); }

    static Transcript load(const std::string& path);
    void save(const std::string& path) const;

    static Transcript from_json_text(const std::string& text);
    std::string to_json_text() const;

    const Completion& lookup(const std::string& key) const;

private:
    std::map<std::string, Completion> entries_;
};

/// Replays a transcript keyed by prompt hash: the deterministic offline
/// backend the test suite and the mock pipeline run on.
class TranscriptClient : public GenClient {
public:
    explicit TranscriptClient(Transcript transcript) : transcript_(std::move(transcript)) {}

    Completion complete(const std::string& system_prompt, const std::string& user_prompt) override;

private:
    Transcript transcript_;
};

/// In-memory mock answering with a fixed response sequence, wrapping at the
/// end. Call order is the replay order, guarded for concurrent use.
class ScriptedClient : public GenClient {
public:
    explicit ScriptedClient(std::vector<std::string> responses,
                            catalog::UsageRecord usage_per_call = {10, 10});

    Completion complete(const std::string& system_prompt, const std::string& user_prompt) override;

    std::size_t calls() const;
    const std::vector<std::string>& seen_prompts() const { return seen_prompts_; }

private:
    mutable std::mutex mutex_;
    std::vector<std::string> responses_;
    catalog::UsageRecord usage_;
    std::size_t next_ = 0;
    std::size_t calls_ = 0;
    std::vector<std::string> seen_prompts_;
};

struct HttpClientConfig {
    std::string base_url;                        // e.g. https://api.example.com
    std::string path = "/v1/chat/completions";   // OpenAI-style endpoint
    std::string model;
    std::string api_key_env = "TROUTER_API_KEY"; // credential env var name
    int timeout_seconds = 120;
};

/// Live backend over an OpenAI-style chat completions API.
std::unique_ptr<GenClient> make_http_client(const HttpClientConfig& config);

}  // namespace trouter::gen
