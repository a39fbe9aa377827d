#include "trouter/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace trouter::evalharness {

std::vector<Scenario> default_scenarios() {
    return {
        {"cost-first", catalog::PreferenceWeights(0.2, 0.8)},
        {"balanced", catalog::PreferenceWeights(0.5, 0.5)},
        {"performance-first", catalog::PreferenceWeights(0.8, 0.2)},
    };
}

ScenarioReport evaluate(const Policy& policy, const datakit::Corpus& corpus,
                        const std::vector<Scenario>& scenarios) {
    if (corpus.records.empty()) throw RouterError("cannot evaluate an empty corpus");

    struct QueryCells {
        std::string query_text;
        std::map<std::string, catalog::MetricPair> observed;
    };
    std::map<std::string, QueryCells> queries;
    for (const auto& record : corpus.records) {
        if (!record.perf_norm || !record.cost_norm)
            throw RouterError("corpus must be normalized before evaluation");
        auto& q = queries[record.query_id];
        q.query_text = record.query_text;
        q.observed[record.model_id] = {*record.perf_norm, *record.cost_norm};
    }

    ScenarioReport report;
    for (const auto& scenario : scenarios) {
        double cost_sum = 0.0;
        double perf_sum = 0.0;
        double utility_sum = 0.0;
        for (const auto& [query_id, cells] : queries) {
            RoutingContext ctx{query_id, cells.query_text, &cells.observed};
            const std::string chosen = policy(ctx, scenario.mu);
            auto it = cells.observed.find(chosen);
            if (it == cells.observed.end())
                throw RouterError("corpus incomplete: no cell for model '" + chosen +
                                  "' on query " + query_id);
            cost_sum += it->second.cost_norm;
            perf_sum += it->second.perf_norm;
            utility_sum +=
                catalog::utility(scenario.mu, it->second.perf_norm, it->second.cost_norm);
        }
        const double n = static_cast<double>(queries.size());
        ScenarioRow row;
        row.scenario = scenario.name;
        row.mu_r = scenario.mu.mu_r();
        row.mean_cost = cost_sum / n;
        row.mean_perf = perf_sum / n;
        row.utility = catalog::utility(scenario.mu, row.mean_perf, row.mean_cost);
        row.utility_query_mean = utility_sum / n;
        report.utility_sum += row.utility;
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string emit_report(const std::vector<std::pair<std::string, ScenarioReport>>& reports,
                        ReportFormat format) {
    std::ostringstream out;
    switch (format) {
        case ReportFormat::Table: {
            out << "policy               scenario             cost      perf      utility\n";
            for (const auto& [name, report] : reports) {
                for (const auto& row : report.rows) {
                    char line[160];
                    std::snprintf(line, sizeof(line), "%-20s %-20s %9.4f %9.4f %9.4f\n",
                                  name.c_str(), row.scenario.c_str(), row.mean_cost,
                                  row.mean_perf, row.utility);
                    out << line;
                }
                char line[160];
                std::snprintf(line, sizeof(line), "%-20s %-20s %29.4f\n", name.c_str(),
                              "utility-sum", report.utility_sum);
                out << line;
            }
            break;
        }
        case ReportFormat::Delimited: {
            out << "policy,scenario,cost,perf,utility,utility_query_mean\n";
            for (const auto& [name, report] : reports)
                for (const auto& row : report.rows)
                    out << name << ',' << row.scenario << ',' << fmt(row.mean_cost) << ','
                        << fmt(row.mean_perf) << ',' << fmt(row.utility) << ','
                        << fmt(row.utility_query_mean) << '\n';
            break;
        }
        case ReportFormat::PlotData: {
            out << "# scenario policy cost perf utility\n";
            for (const auto& [name, report] : reports) {
                for (const auto& row : report.rows)
                    out << row.scenario << '\t' << name << '\t' << fmt(row.mean_cost) << '\t'
                        << fmt(row.mean_perf) << '\t' << fmt(row.utility) << '\n';
                for (const auto& row : report.rows)
                    out << row.scenario << "/per-query" << '\t' << name << '\t'
                        << fmt(row.mean_cost) << '\t' << fmt(row.mean_perf) << '\t'
                        << fmt(row.utility_query_mean) << '\n';
            }
            break;
        }
    }
    return out.str();
}

namespace {

taxonomy::Taxonomy build_world_taxonomy(std::size_t K) {
    const std::size_t per_subcat = 5;
    const std::size_t n_subcats = (K + per_subcat - 1) / per_subcat;
    const std::size_t n_domains = (n_subcats + 9) / 10;

    std::vector<taxonomy::TaskNode> domains;
    std::size_t leaf = 0;
    std::size_t subcat_index = 0;
    for (std::size_t d = 0; d < n_domains; ++d) {
        taxonomy::TaskNode domain;
        domain.level = taxonomy::Level::Domain;
        domain.short_name = "World Domain " + std::to_string(d + 1);
        domain.definition = "Synthetic task area " + std::to_string(d + 1) + ".";
        domain.example = "A query drawn from synthetic area " + std::to_string(d + 1) + ".";
        while (domain.children.size() < 10 && subcat_index < n_subcats) {
            taxonomy::TaskNode subcat;
            subcat.level = taxonomy::Level::Subcategory;
            subcat.short_name = "Cluster " + std::to_string(subcat_index + 1);
            subcat.definition = "Synthetic query cluster " + std::to_string(subcat_index + 1) + ".";
            subcat.example = "A query from cluster " + std::to_string(subcat_index + 1) + ".";
            for (std::size_t l = 0; l < per_subcat && leaf < K; ++l, ++leaf) {
                taxonomy::TaskNode diff;
                diff.level = taxonomy::Level::Difficulty;
                diff.short_name = "Level " + std::to_string(l + 1);
                diff.definition = "Synthetic type " + std::to_string(leaf + 1) + ".";
                diff.example = "A query of type " + std::to_string(leaf + 1) + ".";
                subcat.children.push_back(std::move(diff));
            }
            ++subcat_index;
            domain.children.push_back(std::move(subcat));
        }
        domains.push_back(std::move(domain));
    }
    return taxonomy::Taxonomy(std::move(domains));
}

catalog::ModelPool build_world_pool(std::size_t M) {
    std::vector<catalog::ModelSpec> models;
    for (std::size_t m = 0; m < M; ++m) {
        catalog::ModelSpec spec;
        char id[32];
        std::snprintf(id, sizeof(id), "model-%02zu", m);
        spec.model_id = id;
        spec.family = "synthetic";
        spec.size_label = std::to_string(m + 1) + "B";
        spec.input_price = 0.5 * static_cast<double>(m + 1);
        spec.output_price = 2.0 * static_cast<double>(m + 1);
        models.push_back(std::move(spec));
    }
    return catalog::ModelPool(std::move(models));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

SyntheticWorld synthetic_world(std::uint64_t seed, const WorldOptions& options) {
    if (options.K < 2 || options.M < 2) throw RouterError("synthetic world needs K >= 2, M >= 2");
    const std::size_t d_in = options.d_in == 0 ? options.K : options.d_in;

    SyntheticWorld world(build_world_taxonomy(options.K), build_world_pool(options.M));
    for (const auto& m : world.pool.models()) world.model_ids.push_back(m.model_id);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    world.true_perf.assign(options.K, std::vector<double>(options.M, 0.0));
    world.true_cost.assign(options.K, std::vector<double>(options.M, 0.0));
    for (std::size_t t = 0; t < options.K; ++t)
        for (std::size_t m = 0; m < options.M; ++m) {
            world.true_perf[t][m] = uniform(rng);
            world.true_cost[t][m] = uniform(rng);
        }

    // Type centers: orthogonal one-hot axes when the space is wide enough.
    std::vector<std::vector<double>> centers(options.K, std::vector<double>(d_in, 0.0));
    for (std::size_t t = 0; t < options.K; ++t) {
        if (d_in >= options.K) {
            centers[t][t] = 1.0;
        } else {
            double norm = 0.0;
            for (auto& v : centers[t]) {
                v = noise(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (auto& v : centers[t]) v /= norm;
        }
    }

    world.embedder = std::make_shared<embedding::TableEmbedder>(
        std::map<std::string, std::vector<double>>{}, d_in);

    const auto profiles = world.taxonomy.flatten_difficulty();
    if (profiles.size() != options.K) throw RouterError("world taxonomy has wrong leaf count");
    for (std::size_t t = 0; t < options.K; ++t)
        world.embedder->insert(profiles[t].rendered_text, centers[t]);

    const int per_type = options.train_per_type + options.val_per_type + options.test_per_type;
    for (std::size_t t = 0; t < options.K; ++t) {
        for (int j = 0; j < per_type; ++j) {
            const std::string text =
                "type " + std::to_string(t) + " query " + std::to_string(j);
            std::vector<double> vec = centers[t];
            double norm = 0.0;
            for (auto& v : vec) {
                v += options.embed_noise * noise(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (auto& v : vec) v /= norm;
            world.embedder->insert(text, vec);

            datakit::Split split = datakit::Split::Test;
            if (j < options.train_per_type)
                split = datakit::Split::Train;
            else if (j < options.train_per_type + options.val_per_type)
                split = datakit::Split::Val;

            const std::string query_id = stable_hash("world:" + text);
            for (std::size_t m = 0; m < options.M; ++m) {
                datakit::MetricRecord record;
                record.query_id = query_id;
                record.query_text = text;
                record.model_id = world.model_ids[m];
                record.raw_perf = clamp01(world.true_perf[t][m] + options.noise_sigma * noise(rng));
                record.raw_cost = clamp01(world.true_cost[t][m] + options.noise_sigma * noise(rng));
                // Metrics are generated directly on the normalized scale.
                record.perf_norm = record.raw_perf;
                record.cost_norm = record.raw_cost;
                record.task_index = static_cast<int>(t);
                record.split = split;
                world.corpus.records.push_back(std::move(record));
            }
        }
    }
    return world;
}

datakit::Corpus filter_split(const datakit::Corpus& corpus, datakit::Split split) {
    datakit::Corpus out;
    for (const auto& record : corpus.records)
        if (record.split == split) out.records.push_back(record);
    return out;
}

datakit::Corpus limit_train_shots(const datakit::Corpus& corpus, int shots) {
    std::map<int, std::set<std::string>> kept_per_type;
    std::set<std::string> dropped;
    for (const auto& record : corpus.records) {
        if (record.split != datakit::Split::Train) continue;
        const int type = record.task_index.value_or(-1);
        auto& kept = kept_per_type[type];
        if (kept.count(record.query_id)) continue;
        if (static_cast<int>(kept.size()) < shots)
            kept.insert(record.query_id);
        else
            dropped.insert(record.query_id);
    }
    datakit::Corpus out;
    for (const auto& record : corpus.records)
        if (record.split != datakit::Split::Train || !dropped.count(record.query_id))
            out.records.push_back(record);
    return out;
}

}  // namespace trouter::evalharness
