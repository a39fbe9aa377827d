#include "trouter/genclient.hpp"

#include <cstdlib>

#include <json.hpp>

namespace trouter::gen {

using nlohmann::json;

std::string transcript_key(const std::string& system_prompt, const std::string& user_prompt) {
    std::string joined = system_prompt;
    joined += '\x1f';
    joined += user_prompt;
    return stable_hash(joined);
}

void Transcript::add(const std::string& system_prompt, const std::string& user_prompt,
                     const std::string& text, catalog::UsageRecord usage) {
    add_keyed(transcript_key(system_prompt, user_prompt), text, usage);
}

void Transcript::add_keyed(const std::string& key, const std::string& text,
                           catalog::UsageRecord usage) {
    entries_[key] = Completion{text, usage};
}

const Completion& Transcript::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw RouterError("transcript has no entry for prompt key " + key);
    return it->second;
}

std::string Transcript::to_json_text() const {
    json doc;
    doc["entries"] = json::array();
    for (const auto& [key, completion] : entries_) {
        json entry;
        entry["key"] = key;
        entry["text"] = completion.text;
        entry["input_tokens"] = completion.usage.input_tokens;
        entry["output_tokens"] = completion.usage.output_tokens;
        doc["entries"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

Transcript Transcript::from_json_text(const std::string& text) {
    Transcript transcript;
    json doc = json::parse(text);
    for (const auto& entry : doc.at("entries")) {
        catalog::UsageRecord usage{entry.value("input_tokens", 0ull),
                                   entry.value("output_tokens", 0ull)};
        transcript.add_keyed(entry.at("key").get<std::string>(),
                             entry.at("text").get<std::string>(), usage);
    }
    return transcript;
}

Transcript Transcript::load(const std::string& path) {
    return from_json_text(read_text_file(path));
}

void Transcript::save(const std::string& path) const { write_text_file(path, to_json_text()); }

Completion TranscriptClient::complete(const std::string& system_prompt,
                                      const std::string& user_prompt) {
    return transcript_.lookup(transcript_key(system_prompt, user_prompt));
}

ScriptedClient::ScriptedClient(std::vector<std::string> responses,
                               catalog::UsageRecord usage_per_call)
    : responses_(std::move(responses)), usage_(usage_per_call) {
    if (responses_.empty()) throw RouterError("scripted client needs at least one response");
}

Completion ScriptedClient::complete(const std::string& system_prompt,
                                    const std::string& user_prompt) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string& text = responses_[next_ % responses_.size()];
    ++next_;
    ++calls_;
    seen_prompts_.push_back(system_prompt + user_prompt);
    return Completion{text, usage_};
}

std::size_t ScriptedClient::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

}  // namespace trouter::gen
