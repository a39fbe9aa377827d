// trouter: command-line front end chaining the routing pipeline
// (synthesize -> collect -> split/normalize -> train -> eval -> serve).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "trouter/baselines.hpp"
#include "trouter/catalog.hpp"
#include "trouter/datakit.hpp"
#include "trouter/evalharness.hpp"
#include "trouter/gateway.hpp"
#include "trouter/genclient.hpp"
#include "trouter/router.hpp"
#include "trouter/synthesis.hpp"
#include "trouter/taxonomy.hpp"

namespace {

using namespace trouter;

/// Environment overrides outrank both flags and config-file values. Each
/// binding maps TROUTER_<NAME> onto an already-parsed option value.
class EnvOverrides {
public:
    void bind(const std::string& name, std::string* target) {
        items_.emplace_back(name, [target](const std::string& v) { *target = v; });
    }
    void bind(const std::string& name, double* target) {
        items_.emplace_back(name, [target](const std::string& v) { *target = std::stod(v); });
    }
    void bind(const std::string& name, int* target) {
        items_.emplace_back(name, [target](const std::string& v) { *target = std::stoi(v); });
    }
    void bind(const std::string& name, std::uint64_t* target) {
        items_.emplace_back(name, [target](const std::string& v) { *target = std::stoull(v); });
    }

    void apply() const {
        for (const auto& [name, assign] : items_) {
            const std::string env_name = "TROUTER_" + name;
            if (const char* value = std::getenv(env_name.c_str())) assign(value);
        }
    }

private:
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>> items_;
};

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::string mock_transcript;
    std::string live_base_url;
    std::string live_model;
    std::string live_api_key_env = "TROUTER_API_KEY";
};

std::unique_ptr<gen::GenClient> make_client(const GlobalOptions& global) {
    if (!global.mock_transcript.empty())
        return std::make_unique<gen::TranscriptClient>(
            gen::Transcript::load(global.mock_transcript));
    if (!global.live_base_url.empty()) {
        gen::HttpClientConfig config;
        config.base_url = global.live_base_url;
        config.model = global.live_model;
        config.api_key_env = global.live_api_key_env;
        return gen::make_http_client(config);
    }
    throw RouterError("no generation backend: pass --mock-transcript or --live-base-url");
}

std::vector<taxonomy::TaskNode> load_seed_domains(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(read_text_file(path));
    std::vector<taxonomy::TaskNode> seeds;
    for (const auto& entry : doc.at("domains")) {
        taxonomy::TaskNode node;
        node.level = taxonomy::Level::Domain;
        node.short_name = entry.at("name").get<std::string>();
        node.definition = entry.value("definition", std::string{});
        node.example = entry.value("example", std::string{});
        seeds.push_back(std::move(node));
    }
    return seeds;
}

int cmd_synth_taxonomy(const GlobalOptions& global, const std::string& seeds_path,
                       const std::string& out_path) {
    auto client = make_client(global);
    synthesis::ExpandOptions options;
    options.refine.shuffle_seed = global.seed;
    const auto taxonomy =
        synthesis::expand_taxonomy(load_seed_domains(seeds_path), *client, options);
    taxonomy.save(out_path);
    std::cout << "taxonomy: " << taxonomy.domains().size() << " domains, "
              << taxonomy.difficulty_count() << " difficulty profiles -> " << out_path << "\n";
    return 0;
}

int cmd_synth_qa(const GlobalOptions& global, const std::string& taxonomy_path,
                 const std::string& out_path, int target, int batch, double threshold,
                 std::size_t embed_dim, double engine_input_price, double engine_output_price) {
    auto client = make_client(global);
    const auto taxonomy = taxonomy::Taxonomy::load(taxonomy_path);
    embedding::HashProjectionEmbedder embedder(embed_dim, global.seed);
    synthesis::SynthesisOptions options;
    options.target = target;
    options.batch = batch;
    options.dedup_threshold = threshold;
    if (engine_input_price > 0.0 || engine_output_price > 0.0)
        options.engine_pricing =
            catalog::ModelSpec{"engine", "", std::nullopt, engine_input_price,
                               engine_output_price};
    const auto dataset = synthesis::build_dataset(taxonomy, *client, embedder, options);
    dataset.save(out_path);
    std::cout << "dataset: " << dataset.pairs.size() << " qa pairs ("
              << dataset.synthesis_usage.input_tokens << " in / "
              << dataset.synthesis_usage.output_tokens << " out tokens";
    if (options.engine_pricing) std::cout << ", cost " << dataset.synthesis_cost;
    std::cout << ") -> " << out_path << "\n";
    return 0;
}

int cmd_collect(const GlobalOptions& global, const std::string& dataset_path,
                const std::string& pool_path, const std::string& taxonomy_path,
                const std::string& out_path, int threads) {
    if (global.mock_transcript.empty())
        throw RouterError("collect currently runs against --mock-transcript executors");
    const auto transcript = gen::Transcript::load(global.mock_transcript);
    datakit::TranscriptExecutor executor(transcript);
    gen::TranscriptClient judge(transcript);

    const auto dataset = synthesis::QaDataset::load(dataset_path);
    const auto pool = catalog::ModelPool::load(pool_path);
    const auto taxonomy = taxonomy::Taxonomy::load(taxonomy_path);

    std::map<std::string, int> profile_index;
    {
        int index = 0;
        for (const auto& profile : taxonomy.flatten_difficulty())
            profile_index[profile.profile_id] = index++;
    }

    datakit::CollectOptions options;
    options.threads = threads;
    const auto result = datakit::collect(dataset, pool, executor, judge, profile_index, options);
    result.corpus.save(out_path);
    std::cout << "corpus: " << result.corpus.records.size() << " records ("
              << result.executor_failures << " executor failures, " << result.judge_failures
              << " judge failures) -> " << out_path << "\n";
    return 0;
}

int cmd_split(const GlobalOptions& global, const std::string& corpus_path,
              const std::string& out_path, const std::string& ratios_text) {
    auto corpus = datakit::Corpus::load(corpus_path);
    datakit::SplitRatios ratios;
    if (!ratios_text.empty()) {
        double a = 0;
        double b = 0;
        double c = 0;
        if (std::sscanf(ratios_text.c_str(), "%lf:%lf:%lf", &a, &b, &c) != 3)
            throw RouterError("--ratios expects the form 7:1:2");
        ratios = {a, b, c};
    }
    datakit::split(corpus.records, ratios, global.seed);
    corpus.save(out_path);
    std::cout << "split: " << corpus.records.size() << " records -> " << out_path << "\n";
    return 0;
}

int cmd_normalize(const std::string& corpus_path, const std::string& out_path,
                  const std::string& stats_in, const std::string& stats_out) {
    auto corpus = datakit::Corpus::load(corpus_path);
    std::optional<datakit::NormStats> given;
    if (!stats_in.empty()) given = datakit::NormStats::load(stats_in);
    const auto stats = datakit::normalize(corpus.records, given);
    corpus.save(out_path);
    if (!stats_out.empty()) stats.save(stats_out);
    std::cout << "normalized " << corpus.records.size() << " records -> " << out_path << "\n";
    return 0;
}

struct TrainCli {
    std::string corpus_path;
    std::string taxonomy_path;
    std::string pool_path;
    std::string stats_path;
    std::string out_path;
    std::string arch = "trouter";
    double lr = 1e-4;
    int epochs = 200;
    int batch_size = 64;
    int patience = 10;
    std::size_t d_latent = 256;
    std::size_t hidden = 256;
    double tau = 0.07;
    std::size_t embed_dim = 64;
    std::uint64_t embed_seed = 1;
};

int cmd_train(const GlobalOptions& global, const TrainCli& cli) {
    const auto corpus = datakit::Corpus::load(cli.corpus_path);
    const auto taxonomy = taxonomy::Taxonomy::load(cli.taxonomy_path);
    const auto pool = catalog::ModelPool::load(cli.pool_path);

    std::vector<std::string> model_ids;
    for (const auto& m : pool.models()) model_ids.push_back(m.model_id);

    router::EmbedderSpec embedder_spec{"hash_projection", cli.embed_dim, cli.embed_seed};
    auto embedder = router::make_embedder(embedder_spec);
    const auto data = router::build_training_data(corpus, taxonomy, model_ids, *embedder);
    if (data.skipped_incomplete > 0)
        std::cerr << "warning: skipped " << data.skipped_incomplete
                  << " queries with incomplete model rows\n";

    router::TrainConfig train_config;
    train_config.lr = cli.lr;
    train_config.epochs = cli.epochs;
    train_config.batch_size = cli.batch_size;
    train_config.patience = cli.patience;
    train_config.seed = global.seed;

    std::string normstats_hash;
    if (!cli.stats_path.empty())
        normstats_hash = datakit::NormStats::load(cli.stats_path).stable_hash();

    if (cli.arch == "trouter") {
        router::RouterConfig config;
        config.d_latent = cli.d_latent;
        config.hidden = cli.hidden;
        config.tau = cli.tau;
        auto result = router::train(data, config, train_config);
        result.params.taxonomy_hash = taxonomy.stable_hash();
        result.params.normstats_hash = normstats_hash;
        result.params.embedder = embedder_spec;
        result.params.save(cli.out_path);
        std::cout << "trained trouter: " << result.train_losses.size() << " epochs, final loss "
                  << result.train_losses.back() << " -> " << cli.out_path << "\n";
    } else if (cli.arch == "metric") {
        auto result = baselines::metric_router_train(data, cli.d_latent, cli.hidden, train_config);
        result.params.embedder = embedder_spec;
        result.params.normstats_hash = normstats_hash;
        result.params.save(cli.out_path);
        std::cout << "trained metric router: " << result.train_losses.size()
                  << " epochs, final loss " << result.train_losses.back() << " -> "
                  << cli.out_path << "\n";
    } else {
        throw RouterError("--arch must be 'trouter' or 'metric'");
    }
    return 0;
}

struct EvalCli {
    std::string corpus_path;
    std::string pool_path;
    std::string snapshot_path;
    std::string metric_snapshot_path;
    std::string policies = "smallest,largest,adaptive,oracle";
    std::string report_path;
    std::string format = "table";
    std::string split = "test";
};

int cmd_eval(const GlobalOptions& global, const EvalCli& cli) {
    auto corpus = datakit::Corpus::load(cli.corpus_path);
    if (cli.split != "all") {
        corpus = evalharness::filter_split(corpus, datakit::split_from_name(cli.split));
        if (corpus.records.empty())
            throw RouterError("corpus has no records in split '" + cli.split + "'");
    }

    std::optional<catalog::ModelPool> pool;
    if (!cli.pool_path.empty()) pool = catalog::ModelPool::load(cli.pool_path);

    std::optional<router::RouterParams> trouter_params;
    std::unique_ptr<embedding::EmbeddingProvider> trouter_embedder;
    if (!cli.snapshot_path.empty()) {
        trouter_params = router::RouterParams::load(cli.snapshot_path);
        trouter_embedder = router::make_embedder(trouter_params->embedder);
    }
    std::optional<baselines::MetricRouterParams> metric_params;
    std::unique_ptr<embedding::EmbeddingProvider> metric_embedder;
    if (!cli.metric_snapshot_path.empty()) {
        metric_params = baselines::MetricRouterParams::load(cli.metric_snapshot_path);
        metric_embedder = router::make_embedder(metric_params->embedder);
    }

    std::shared_ptr<gen::GenClient> prompt_client;

    auto make_policy = [&](const std::string& name) -> evalharness::Policy {
        if (name == "oracle")
            return [](const evalharness::RoutingContext& ctx,
                      const catalog::PreferenceWeights& mu) {
                return baselines::oracle(*ctx.observed, mu);
            };
        if (name == "smallest" || name == "largest" || name == "adaptive") {
            if (!pool) throw RouterError("policy '" + name + "' needs --pool");
            const auto models = pool->models();
            if (name == "smallest") {
                const auto id = baselines::smallest(models);
                return [id](const auto&, const auto&) { return id; };
            }
            if (name == "largest") {
                const auto id = baselines::largest(models);
                return [id](const auto&, const auto&) { return id; };
            }
            return [models](const evalharness::RoutingContext&,
                            const catalog::PreferenceWeights& mu) {
                return baselines::adaptive(models, mu);
            };
        }
        if (name == "prompt") {
            if (!pool) throw RouterError("policy 'prompt' needs --pool");
            if (!prompt_client) prompt_client = make_client(global);
            const auto models = pool->models();
            return [models, client = prompt_client](const evalharness::RoutingContext& ctx,
                                                    const catalog::PreferenceWeights& mu) {
                return baselines::prompt_select(ctx.query_text, models, mu, *client).model_id;
            };
        }
        if (name == "trouter") {
            if (!trouter_params) throw RouterError("policy 'trouter' needs --snapshot");
            return [&](const evalharness::RoutingContext& ctx,
                       const catalog::PreferenceWeights& mu) {
                return router::infer(*trouter_params, trouter_embedder->embed(ctx.query_text), mu)
                    .model_id;
            };
        }
        if (name == "metric") {
            if (!metric_params) throw RouterError("policy 'metric' needs --metric-snapshot");
            return [&](const evalharness::RoutingContext& ctx,
                       const catalog::PreferenceWeights& mu) {
                return baselines::metric_router_infer(*metric_params,
                                                      metric_embedder->embed(ctx.query_text), mu)
                    .model_id;
            };
        }
        throw RouterError("unknown policy: " + name);
    };

    std::vector<std::pair<std::string, evalharness::ScenarioReport>> reports;
    std::stringstream names(cli.policies);
    std::string name;
    while (std::getline(names, name, ',')) {
        if (name.empty()) continue;
        reports.emplace_back(name, evalharness::evaluate(make_policy(name), corpus));
    }

    evalharness::ReportFormat format = evalharness::ReportFormat::Table;
    if (cli.format == "delimited") format = evalharness::ReportFormat::Delimited;
    else if (cli.format == "plotdata") format = evalharness::ReportFormat::PlotData;
    else if (cli.format != "table") throw RouterError("--format must be table|delimited|plotdata");

    const std::string rendered = evalharness::emit_report(reports, format);
    if (cli.report_path.empty()) {
        std::cout << rendered;
    } else {
        write_text_file(cli.report_path, rendered);
        std::cout << "report -> " << cli.report_path << "\n";
    }
    return 0;
}

int cmd_route(const std::string& snapshot_path, const std::string& query, double mu_r,
              bool as_json) {
    const auto params = router::RouterParams::load(snapshot_path);
    const auto embedder = router::make_embedder(params.embedder);
    const auto mu = catalog::PreferenceWeights::from_mu_r(mu_r);
    const auto result = router::infer(params, embedder->embed(query), mu);
    const auto& chosen = result.per_model.at(result.model_id);
    const double chosen_utility = catalog::utility(mu, chosen.perf_norm, chosen.cost_norm);

    if (as_json) {
        nlohmann::json out;
        out["model_id"] = result.model_id;
        out["utility"] = chosen_utility;
        out["per_model"] = nlohmann::json::array();
        for (const auto& [id, pair] : result.per_model)
            out["per_model"].push_back({{"model_id", id},
                                        {"perf", pair.perf_norm},
                                        {"cost", pair.cost_norm},
                                        {"utility", catalog::utility(mu, pair.perf_norm,
                                                                     pair.cost_norm)}});
        out["posterior_topk"] = nlohmann::json::array();
        for (const auto& [profile_id, prob] : router::posterior_topk(params, result.posterior, 5))
            out["posterior_topk"].push_back({{"profile_id", profile_id}, {"probability", prob}});
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "model: " << result.model_id << "\n";
        std::cout << "utility: " << chosen_utility << "\n";
        for (const auto& [id, pair] : result.per_model)
            std::cout << "  " << id << " perf=" << pair.perf_norm << " cost=" << pair.cost_norm
                      << " utility=" << catalog::utility(mu, pair.perf_norm, pair.cost_norm)
                      << "\n";
    }
    return 0;
}

int cmd_serve(const std::string& snapshot_path, const std::string& pool_path,
              const std::string& host, int port) {
    gateway::GatewayConfig config;
    config.snapshot_path = snapshot_path;
    if (!pool_path.empty()) config.pool_path = pool_path;
    config.host = host;
    config.port = port;
    gateway::RouterService service(std::move(config));
    const int bound = service.bind();
    std::cout << "serving on " << host << ":" << bound << "\n";
    service.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-type-aware LLM routing pipeline"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.fallthrough();

    GlobalOptions global;
    EnvOverrides env;
    app.add_option("--seed", global.seed, "global random seed");
    app.add_option("--mock-transcript", global.mock_transcript,
                   "replay completions from this transcript file");
    app.add_option("--live-base-url", global.live_base_url, "live generation endpoint");
    app.add_option("--live-model", global.live_model, "model name for the live endpoint");
    app.add_option("--live-api-key-env", global.live_api_key_env,
                   "environment variable holding the API key");
    env.bind("SEED", &global.seed);
    env.bind("MOCK_TRANSCRIPT", &global.mock_transcript);
    env.bind("LIVE_BASE_URL", &global.live_base_url);
    env.bind("LIVE_MODEL", &global.live_model);
    env.bind("LIVE_API_KEY_ENV", &global.live_api_key_env);

    // synth-taxonomy
    auto* synth_tax = app.add_subcommand("synth-taxonomy", "expand seed domains into a taxonomy");
    std::string seeds_path;
    std::string tax_out;
    synth_tax->add_option("--seeds", seeds_path, "seed domains file")->required();
    synth_tax->add_option("--out", tax_out, "taxonomy output file")->required();

    // synth-qa
    auto* synth_qa = app.add_subcommand("synth-qa", "generate deduplicated QA pairs per profile");
    std::string qa_tax;
    std::string qa_out;
    int qa_target = 40;
    int qa_batch = 8;
    double qa_threshold = 0.9;
    std::size_t qa_embed_dim = 64;
    double qa_engine_in = 0.0;
    double qa_engine_out = 0.0;
    synth_qa->add_option("--taxonomy", qa_tax)->required();
    synth_qa->add_option("--out", qa_out)->required();
    synth_qa->add_option("--target", qa_target, "diverse pairs per profile");
    synth_qa->add_option("--batch", qa_batch, "pairs per generation call");
    synth_qa->add_option("--threshold", qa_threshold, "dedup cosine threshold");
    synth_qa->add_option("--embed-dim", qa_embed_dim, "dedup embedder dimension");
    synth_qa->add_option("--engine-input-price", qa_engine_in,
                         "generation engine price per million input tokens");
    synth_qa->add_option("--engine-output-price", qa_engine_out,
                         "generation engine price per million output tokens");
    env.bind("TARGET", &qa_target);
    env.bind("BATCH", &qa_batch);
    env.bind("THRESHOLD", &qa_threshold);

    // collect
    auto* collect = app.add_subcommand("collect", "run pool models and judge over a dataset");
    std::string col_dataset;
    std::string col_pool;
    std::string col_tax;
    std::string col_out;
    int col_threads = 1;
    collect->add_option("--dataset", col_dataset)->required();
    collect->add_option("--pool", col_pool)->required();
    collect->add_option("--taxonomy", col_tax)->required();
    collect->add_option("--out", col_out)->required();
    collect->add_option("--threads", col_threads, "concurrent (query, model) cells");

    // split
    auto* split_cmd = app.add_subcommand("split", "assign train/val/test by query id");
    std::string split_corpus;
    std::string split_out;
    std::string split_ratios;
    split_cmd->add_option("--corpus", split_corpus)->required();
    split_cmd->add_option("--out", split_out)->required();
    split_cmd->add_option("--ratios", split_ratios, "e.g. 7:1:2");

    // normalize
    auto* norm_cmd = app.add_subcommand("normalize", "min-max normalize metrics");
    std::string norm_corpus;
    std::string norm_out;
    std::string norm_stats_in;
    std::string norm_stats_out;
    norm_cmd->add_option("--corpus", norm_corpus)->required();
    norm_cmd->add_option("--out", norm_out)->required();
    norm_cmd->add_option("--stats", norm_stats_in, "reuse previously fitted stats");
    norm_cmd->add_option("--stats-out", norm_stats_out, "write fitted stats here");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a router on a labeled corpus");
    TrainCli train_cli;
    train_cmd->add_option("--corpus", train_cli.corpus_path)->required();
    train_cmd->add_option("--taxonomy", train_cli.taxonomy_path)->required();
    train_cmd->add_option("--pool", train_cli.pool_path)->required();
    train_cmd->add_option("--stats", train_cli.stats_path, "normalization stats sidecar");
    train_cmd->add_option("--out", train_cli.out_path)->required();
    train_cmd->add_option("--arch", train_cli.arch, "trouter|metric");
    train_cmd->add_option("--lr", train_cli.lr);
    train_cmd->add_option("--epochs", train_cli.epochs);
    train_cmd->add_option("--batch-size", train_cli.batch_size);
    train_cmd->add_option("--patience", train_cli.patience);
    train_cmd->add_option("--d-latent", train_cli.d_latent);
    train_cmd->add_option("--hidden", train_cli.hidden);
    train_cmd->add_option("--tau", train_cli.tau);
    train_cmd->add_option("--embed-dim", train_cli.embed_dim);
    train_cmd->add_option("--embed-seed", train_cli.embed_seed);
    env.bind("LR", &train_cli.lr);
    env.bind("EPOCHS", &train_cli.epochs);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate policies over a corpus");
    EvalCli eval_cli;
    eval_cmd->add_option("--corpus", eval_cli.corpus_path)->required();
    eval_cmd->add_option("--pool", eval_cli.pool_path);
    eval_cmd->add_option("--snapshot", eval_cli.snapshot_path);
    eval_cmd->add_option("--metric-snapshot", eval_cli.metric_snapshot_path);
    eval_cmd->add_option("--policies", eval_cli.policies, "comma-separated policy names");
    eval_cmd->add_option("--report", eval_cli.report_path, "output file (stdout if omitted)");
    eval_cmd->add_option("--format", eval_cli.format, "table|delimited|plotdata");
    eval_cmd->add_option("--split", eval_cli.split, "test|val|train|all");

    // route
    auto* route_cmd = app.add_subcommand("route", "one-shot local inference");
    std::string route_snapshot;
    std::string route_query;
    double route_mu_r = 0.5;
    bool route_json = false;
    route_cmd->add_option("--snapshot", route_snapshot)->required();
    route_cmd->add_option("--query", route_query)->required();
    route_cmd->add_option("--mu-r", route_mu_r, "performance weight; cost weight is 1 - mu_r");
    route_cmd->add_flag("--json", route_json, "machine-readable output");
    env.bind("MU_R", &route_mu_r);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "run the routing gateway");
    std::string serve_snapshot;
    std::string serve_pool;
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    serve_cmd->add_option("--snapshot", serve_snapshot)->required();
    serve_cmd->add_option("--pool", serve_pool);
    serve_cmd->add_option("--host", serve_host);
    serve_cmd->add_option("--port", serve_port);
    env.bind("HOST", &serve_host);
    env.bind("PORT", &serve_port);

    CLI11_PARSE(app, argc, argv);

    try {
        env.apply();
        if (synth_tax->parsed()) return cmd_synth_taxonomy(global, seeds_path, tax_out);
        if (synth_qa->parsed())
            return cmd_synth_qa(global, qa_tax, qa_out, qa_target, qa_batch, qa_threshold,
                                qa_embed_dim, qa_engine_in, qa_engine_out);
        if (collect->parsed())
            return cmd_collect(global, col_dataset, col_pool, col_tax, col_out, col_threads);
        if (split_cmd->parsed()) return cmd_split(global, split_corpus, split_out, split_ratios);
        if (norm_cmd->parsed())
            return cmd_normalize(norm_corpus, norm_out, norm_stats_in, norm_stats_out);
        if (train_cmd->parsed()) return cmd_train(global, train_cli);
        if (eval_cmd->parsed()) return cmd_eval(global, eval_cli);
        if (route_cmd->parsed()) return cmd_route(route_snapshot, route_query, route_mu_r, route_json);
        if (serve_cmd->parsed()) return cmd_serve(serve_snapshot, serve_pool, serve_host, serve_port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
