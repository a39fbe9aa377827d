#include "trouter/datakit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <json.hpp>

#include "trouter/prompts.hpp"

namespace trouter::datakit {

using nlohmann::json;

std::string_view split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Unassigned: return "unassigned";
    }
    return "unassigned";
}

Split split_from_name(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    if (name == "unassigned") return Split::Unassigned;
    throw RouterError("unknown split name: " + std::string(name));
}

std::string NormStats::to_json_text() const {
    json doc;
    doc["perf"] = {{"min", perf_min}, {"max", perf_max}};
    doc["cost"] = {{"min", cost_min}, {"max", cost_max}};
    return doc.dump(2) + "\n";
}

NormStats NormStats::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    NormStats stats;
    stats.perf_min = doc.at("perf").at("min").get<double>();
    stats.perf_max = doc.at("perf").at("max").get<double>();
    stats.cost_min = doc.at("cost").at("min").get<double>();
    stats.cost_max = doc.at("cost").at("max").get<double>();
    return stats;
}

NormStats NormStats::load(const std::string& path) {
    return from_json_text(read_text_file(path));
}

void NormStats::save(const std::string& path) const { write_text_file(path, to_json_text()); }

std::string NormStats::stable_hash() const { return trouter::stable_hash(to_json_text()); }

namespace {

json record_to_json(const MetricRecord& r) {
    json doc;
    doc["query_id"] = r.query_id;
    doc["query_text"] = r.query_text;
    doc["model_id"] = r.model_id;
    doc["raw_perf"] = r.raw_perf;
    doc["raw_cost"] = r.raw_cost;
    if (r.perf_norm) doc["perf_norm"] = *r.perf_norm;
    if (r.cost_norm) doc["cost_norm"] = *r.cost_norm;
    if (r.task_index) doc["task_index"] = *r.task_index;
    doc["split"] = std::string(split_name(r.split));
    return doc;
}

MetricRecord record_from_json(const json& doc) {
    MetricRecord r;
    r.query_id = doc.at("query_id").get<std::string>();
    r.query_text = doc.value("query_text", std::string{});
    r.model_id = doc.at("model_id").get<std::string>();
    r.raw_perf = doc.at("raw_perf").get<double>();
    r.raw_cost = doc.at("raw_cost").get<double>();
    if (doc.contains("perf_norm")) r.perf_norm = doc["perf_norm"].get<double>();
    if (doc.contains("cost_norm")) r.cost_norm = doc["cost_norm"].get<double>();
    if (doc.contains("task_index")) r.task_index = doc["task_index"].get<int>();
    r.split = split_from_name(doc.value("split", "unassigned"));
    return r;
}

}  // namespace

void Corpus::save(const std::string& path) const {
    std::string out;
    for (const auto& r : records) out += record_to_json(r).dump() + "\n";
    write_text_file(path, out);
}

Corpus Corpus::load(const std::string& path) {
    Corpus corpus;
    for (const auto& line : split_lines(read_text_file(path))) {
        if (trim(line).empty()) continue;
        corpus.records.push_back(record_from_json(json::parse(line)));
    }
    return corpus;
}

std::map<std::string, std::vector<std::size_t>> Corpus::by_query() const {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
        groups[records[i].query_id].push_back(i);
    return groups;
}

namespace {

std::optional<double> parse_first_decimal(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool digit_start =
            std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])));
        if (!digit_start) continue;
        std::size_t start = i;
        if (start > 0 && text[start - 1] == '-') --start;
        std::size_t end = i;
        bool seen_dot = false;
        while (end < text.size()) {
            if (std::isdigit(static_cast<unsigned char>(text[end]))) {
                ++end;
            } else if (text[end] == '.' && !seen_dot) {
                seen_dot = true;
                ++end;
            } else {
                break;
            }
        }
        try {
            return std::stod(text.substr(start, end - start));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

double judge_score(const std::string& question, const std::string& reference_answer,
                   const std::string& response, gen::GenClient& client,
                   const synthesis::GenOptions& options) {
    if (question.empty() || reference_answer.empty() || response.empty())
        throw RouterError("judge_score requires non-empty question, reference, and response");
    const std::string prompt = prompts::render_judge_prompt(question, reference_answer, response);
    int tries = 0;
    for (;;) {
        const auto completion = client.complete("", prompt);
        const auto score = parse_first_decimal(completion.text);
        if (score) return std::clamp(*score, 0.0, 1.0);
        if (++tries > options.max_retries)
            throw ParseError("judge reply contains no numeric score");
    }
}

std::string TranscriptExecutor::key_for(const std::string& model_id,
                                        const std::string& query_text) {
    return gen::transcript_key("exec:" + model_id, query_text);
}

gen::Completion TranscriptExecutor::execute(const std::string& query_text,
                                            const catalog::ModelSpec& model) {
    return transcript_.lookup(key_for(model.model_id, query_text));
}

std::string query_id_for(const synthesis::QaPair& pair) {
    std::string key = pair.profile_id;
    key += '\x1f';
    key += pair.question;
    key += '\x1f';
    key += pair.answer;
    return stable_hash(key);
}

CollectResult collect(const synthesis::QaDataset& dataset, const catalog::ModelPool& pool,
                      ModelExecutor& executor, gen::GenClient& judge_client,
                      const std::map<std::string, int>& profile_index,
                      const CollectOptions& options) {
    struct Cell {
        const synthesis::QaPair* pair;
        const catalog::ModelSpec* model;
        std::string query_id;
    };
    std::vector<Cell> cells;
    cells.reserve(dataset.pairs.size() * pool.size());
    for (const auto& pair : dataset.pairs)
        for (const auto& model : pool.models())
            cells.push_back({&pair, &model, query_id_for(pair)});
    // Canonical (query_id, model_id) order: completion order never matters.
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.query_id != b.query_id) return a.query_id < b.query_id;
        return a.model->model_id < b.model->model_id;
    });

    std::vector<std::optional<MetricRecord>> slots(cells.size());
    std::atomic<int> executor_failures{0};
    std::atomic<int> judge_failures{0};
    std::atomic<std::size_t> next{0};

    auto run_cell = [&](std::size_t index) {
        const Cell& cell = cells[index];
        gen::Completion completion;
        bool executed = false;
        for (int attempt = 0; attempt <= options.executor_retries && !executed; ++attempt) {
            try {
                completion = executor.execute(cell.pair->question, *cell.model);
                executed = true;
            } catch (const std::exception&) {
            }
        }
        if (!executed) {
            ++executor_failures;
            return;
        }
        double score = 0.0;
        try {
            score = options.scorer
                        ? std::clamp(options.scorer(cell.pair->question, cell.pair->answer,
                                                    completion.text),
                                     0.0, 1.0)
                        : judge_score(cell.pair->question, cell.pair->answer, completion.text,
                                      judge_client, options.judge);
        } catch (const std::exception&) {
            ++judge_failures;
            return;
        }
        MetricRecord record;
        record.query_id = cell.query_id;
        record.query_text = cell.pair->question;
        record.model_id = cell.model->model_id;
        record.raw_perf = score;
        record.raw_cost = catalog::compute_cost(*cell.model, completion.usage);
        auto it = profile_index.find(cell.pair->profile_id);
        if (it != profile_index.end()) record.task_index = it->second;
        slots[index] = std::move(record);
    };

    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(i);
                }
            });
        for (auto& w : workers) w.join();
    }

    CollectResult result;
    result.executor_failures = executor_failures.load();
    result.judge_failures = judge_failures.load();
    for (auto& slot : slots)
        if (slot) result.corpus.records.push_back(std::move(*slot));
    return result;
}

namespace {

double rescale(double x, double lo, double hi) {
    if (hi == lo) return 0.5;
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

NormStats normalize(std::vector<MetricRecord>& records, const std::optional<NormStats>& stats) {
    NormStats fitted;
    if (stats) {
        fitted = *stats;
    } else {
        bool any = false;
        for (const auto& r : records) {
            if (r.split != Split::Train) continue;
            if (!any) {
                fitted.perf_min = fitted.perf_max = r.raw_perf;
                fitted.cost_min = fitted.cost_max = r.raw_cost;
                any = true;
            } else {
                fitted.perf_min = std::min(fitted.perf_min, r.raw_perf);
                fitted.perf_max = std::max(fitted.perf_max, r.raw_perf);
                fitted.cost_min = std::min(fitted.cost_min, r.raw_cost);
                fitted.cost_max = std::max(fitted.cost_max, r.raw_cost);
            }
        }
        if (!any) throw RouterError("normalize: no train-split records to fit stats on");
    }
    for (auto& r : records) {
        r.perf_norm = rescale(r.raw_perf, fitted.perf_min, fitted.perf_max);
        r.cost_norm = rescale(r.raw_cost, fitted.cost_min, fitted.cost_max);
    }
    return fitted;
}

void split(std::vector<MetricRecord>& records, const SplitRatios& ratios, std::uint64_t seed) {
    std::vector<std::string> ids;
    for (const auto& r : records) ids.push_back(r.query_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);

    const double total = ratios.train + ratios.val + ratios.test;
    const auto n = static_cast<double>(ids.size());
    const auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train / total));
    const auto n_val = static_cast<std::size_t>(std::llround(n * ratios.val / total));

    std::map<std::string, Split> assignment;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        Split s = Split::Test;
        if (i < n_train)
            s = Split::Train;
        else if (i < n_train + n_val)
            s = Split::Val;
        assignment[ids[i]] = s;
    }
    for (auto& r : records) r.split = assignment.at(r.query_id);
}

AnnotateResult annotate_task_types(std::vector<MetricRecord>& records,
                                   const taxonomy::Taxonomy& taxonomy, gen::GenClient& client,
                                   const synthesis::GenOptions& options) {
    const auto profiles = taxonomy.flatten_difficulty();
    if (profiles.empty()) throw RouterError("cannot annotate against an empty taxonomy");

    std::string menu;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        menu += std::to_string(i) + ". " + profiles[i].domain_name + " / " +
                profiles[i].subcategory_name + " / " + profiles[i].difficulty_name + "\n";
    }

    AnnotateResult result;
    std::map<std::string, std::optional<int>> cache;  // one call per distinct query
    for (auto& record : records) {
        if (record.task_index) continue;
        auto cached = cache.find(record.query_id);
        if (cached == cache.end()) {
            const std::string prompt =
                "Classify the query into exactly one task type from the numbered list.\n"
                "Reply with only the number.\n\nTask types:\n" +
                menu + "\nQuery:\n" + record.query_text + "\n\nNumber:";
            std::optional<int> picked;
            for (int attempt = 0; attempt <= options.max_retries && !picked; ++attempt) {
                const auto completion = client.complete("", prompt);
                const auto value = parse_first_decimal(completion.text);
                if (value && *value >= 0.0 &&
                    *value < static_cast<double>(profiles.size()) &&
                    *value == std::floor(*value))
                    picked = static_cast<int>(*value);
            }
            cached = cache.emplace(record.query_id, picked).first;
        }
        if (cached->second) {
            record.task_index = *cached->second;
            ++result.annotated;
        } else {
            ++result.unparseable;  // stays on the uniform-prior marker
        }
    }
    return result;
}

}  // namespace trouter::datakit
