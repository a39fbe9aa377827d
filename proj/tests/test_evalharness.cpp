#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "trouter/baselines.hpp"
#include "trouter/evalharness.hpp"
#include "trouter/router.hpp"

using namespace trouter;
using datakit::MetricRecord;
using datakit::Split;
using evalharness::Policy;
using evalharness::RoutingContext;

namespace {

/// Corpus in which one model reproduces the reference fixed-policy means
/// exactly while a second model exists so the pool is non-trivial.
datakit::Corpus fixed_policy_corpus(double target_perf, double target_cost, int queries) {
    datakit::Corpus corpus;
    for (int q = 0; q < queries; ++q) {
        // alternate above/below the target so the mean lands exactly on it
        const double delta = (q % 2 == 0) ? 0.01 : -0.01;
        MetricRecord fixed;
        fixed.query_id = "q" + std::to_string(q);
        fixed.query_text = "query " + std::to_string(q);
        fixed.model_id = "fixed";
        fixed.perf_norm = target_perf + delta;
        fixed.cost_norm = target_cost - delta;
        fixed.raw_perf = *fixed.perf_norm;
        fixed.raw_cost = *fixed.cost_norm;
        corpus.records.push_back(fixed);

        MetricRecord other = fixed;
        other.model_id = "other";
        other.perf_norm = 0.5;
        other.cost_norm = 0.5;
        corpus.records.push_back(other);
    }
    return corpus;
}

Policy constant_policy(std::string id) {
    return [id = std::move(id)](const RoutingContext&, const catalog::PreferenceWeights&) {
        return id;
    };
}

}  // namespace

TEST_CASE("evaluate reproduces the reference smallest-model utilities") {
    const auto corpus = fixed_policy_corpus(0.2004, 0.0230, 50);
    const auto report = evalharness::evaluate(constant_policy("fixed"), corpus);
    REQUIRE(report.rows.size() == 3);
    CHECK(std::abs(report.rows[0].utility - 0.0217) < 0.0015);
    CHECK(std::abs(report.rows[1].utility - 0.0887) < 0.0015);
    CHECK(std::abs(report.rows[2].utility - 0.1557) < 0.0015);
    CHECK(std::abs(report.utility_sum - 0.2661) < 0.0015);
}

TEST_CASE("evaluate reproduces the reference largest-model cost-first utility") {
    const auto corpus = fixed_policy_corpus(0.4383, 0.3098, 50);
    const auto report = evalharness::evaluate(constant_policy("fixed"), corpus);
    CHECK(std::abs(report.rows[0].utility - (-0.1601)) < 0.0015);
}

TEST_CASE("scenario utility equals mu_r * mean_perf - mu_c * mean_cost exactly") {
    const auto corpus = fixed_policy_corpus(0.7, 0.2, 21);
    const auto report = evalharness::evaluate(constant_policy("fixed"), corpus);
    for (const auto& row : report.rows) {
        const double expected = row.mu_r * row.mean_perf - (1.0 - row.mu_r) * row.mean_cost;
        CHECK(row.utility == doctest::Approx(expected).epsilon(1e-12));
        // linearity: mean of per-query utilities coincides
        CHECK(row.utility_query_mean == doctest::Approx(row.utility).epsilon(1e-9));
    }
}

TEST_CASE("evaluate is invariant to record order and deterministic") {
    auto corpus = fixed_policy_corpus(0.6, 0.3, 30);
    const auto report = evalharness::evaluate(constant_policy("fixed"), corpus);

    auto shuffled = corpus;
    std::mt19937_64 rng(5);
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
    const auto report2 = evalharness::evaluate(constant_policy("fixed"), shuffled);
    CHECK(report.utility_sum == doctest::Approx(report2.utility_sum).epsilon(1e-12));
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].mean_cost ==
              doctest::Approx(report2.rows[i].mean_cost).epsilon(1e-12));
        CHECK(report.rows[i].mean_perf ==
              doctest::Approx(report2.rows[i].mean_perf).epsilon(1e-12));
    }
}

TEST_CASE("evaluate rejects corpora missing the chosen model's cell") {
    const auto corpus = fixed_policy_corpus(0.5, 0.5, 3);
    CHECK_THROWS_AS(evalharness::evaluate(constant_policy("missing-model"), corpus), RouterError);
}

TEST_CASE("oracle utility upper-bounds every policy on any corpus") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    datakit::Corpus corpus;
    for (int q = 0; q < 40; ++q)
        for (int m = 0; m < 3; ++m) {
            MetricRecord r;
            r.query_id = "q" + std::to_string(q);
            r.model_id = "m" + std::to_string(m);
            r.perf_norm = unit(rng);
            r.cost_norm = unit(rng);
            corpus.records.push_back(std::move(r));
        }

    const Policy oracle_policy = [](const RoutingContext& ctx,
                                    const catalog::PreferenceWeights& mu) {
        return baselines::oracle(*ctx.observed, mu);
    };
    const auto oracle_report = evalharness::evaluate(oracle_policy, corpus);
    for (int m = 0; m < 3; ++m) {
        const auto fixed = evalharness::evaluate(constant_policy("m" + std::to_string(m)), corpus);
        CHECK(oracle_report.utility_sum >= fixed.utility_sum - 1e-12);
        for (std::size_t s = 0; s < 3; ++s)
            CHECK(oracle_report.rows[s].utility_query_mean >=
                  fixed.rows[s].utility_query_mean - 1e-12);
    }
}

TEST_CASE("report formats are structured as documented") {
    const auto corpus = fixed_policy_corpus(0.6, 0.2, 10);
    const auto report = evalharness::evaluate(constant_policy("fixed"), corpus);
    const std::vector<std::pair<std::string, evalharness::ScenarioReport>> reports{
        {"fixed", report}};

    SUBCASE("delimited output round-trips through a CSV parse") {
        const auto text = evalharness::emit_report(reports, evalharness::ReportFormat::Delimited);
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        CHECK(line == "policy,scenario,cost,perf,utility,utility_query_mean");
        int rows = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            REQUIRE(fields.size() == 6);
            CHECK(fields[0] == "fixed");
            const double cost = std::stod(fields[2]);
            const double perf = std::stod(fields[3]);
            const double utility = std::stod(fields[4]);
            const auto& row = report.rows[static_cast<std::size_t>(rows)];
            CHECK(cost == doctest::Approx(row.mean_cost).epsilon(1e-6));
            CHECK(perf == doctest::Approx(row.mean_perf).epsilon(1e-6));
            CHECK(utility == doctest::Approx(row.utility).epsilon(1e-6));
            ++rows;
        }
        CHECK(rows == 3);
    }

    SUBCASE("plotdata rows carry exactly five columns") {
        const auto text = evalharness::emit_report(reports, evalharness::ReportFormat::PlotData);
        std::istringstream in(text);
        std::string line;
        int data_rows = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string field;
            int columns = 0;
            while (std::getline(ss, field, '\t')) ++columns;
            CHECK(columns == 5);
            ++data_rows;
        }
        CHECK(data_rows == 6);  // three scenarios, mean-based plus per-query rows
    }

    SUBCASE("table output regenerates identically") {
        const auto a = evalharness::emit_report(reports, evalharness::ReportFormat::Table);
        const auto b = evalharness::emit_report(reports, evalharness::ReportFormat::Table);
        CHECK(a == b);
        CHECK(a.find("utility-sum") != std::string::npos);
    }
}

TEST_CASE("synthetic worlds are deterministic per seed") {
    const auto a = evalharness::synthetic_world(7, {});
    const auto b = evalharness::synthetic_world(7, {});
    CHECK(a.true_perf == b.true_perf);
    CHECK(a.true_cost == b.true_cost);
    REQUIRE(a.corpus.records.size() == b.corpus.records.size());
    for (std::size_t i = 0; i < a.corpus.records.size(); ++i) {
        CHECK(a.corpus.records[i].query_id == b.corpus.records[i].query_id);
        CHECK(a.corpus.records[i].raw_perf == b.corpus.records[i].raw_perf);
    }
    const auto c = evalharness::synthetic_world(8, {});
    CHECK(a.true_perf != c.true_perf);
}

TEST_CASE("a noise-free world matches its closed-form oracle") {
    evalharness::WorldOptions options;
    options.K = 6;
    options.M = 3;
    options.noise_sigma = 0.0;
    options.train_per_type = 2;
    options.val_per_type = 1;
    options.test_per_type = 4;
    const auto world = evalharness::synthetic_world(11, options);

    const auto test_corpus = evalharness::filter_split(world.corpus, Split::Test);
    const Policy oracle_policy = [](const RoutingContext& ctx,
                                    const catalog::PreferenceWeights& mu) {
        return baselines::oracle(*ctx.observed, mu);
    };
    const auto report = evalharness::evaluate(oracle_policy, test_corpus);

    // closed form: every query of type t realizes the table argmax for t
    const auto scenarios = evalharness::default_scenarios();
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        double expected = 0.0;
        for (std::size_t t = 0; t < options.K; ++t) {
            double best = -2.0;
            for (std::size_t m = 0; m < options.M; ++m)
                best = std::max(best, catalog::utility(scenarios[s].mu, world.true_perf[t][m],
                                                       world.true_cost[t][m]));
            expected += best;
        }
        expected /= static_cast<double>(options.K);
        CHECK(report.rows[s].utility_query_mean == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("world corpora are complete and split as configured") {
    evalharness::WorldOptions options;
    options.K = 4;
    options.M = 3;
    options.train_per_type = 5;
    options.val_per_type = 2;
    options.test_per_type = 3;
    const auto world = evalharness::synthetic_world(13, options);
    CHECK(world.corpus.records.size() == 4u * 10u * 3u);

    std::map<Split, std::set<std::string>> queries_by_split;
    for (const auto& r : world.corpus.records)
        queries_by_split[r.split].insert(r.query_id);
    CHECK(queries_by_split[Split::Train].size() == 4u * 5u);
    CHECK(queries_by_split[Split::Val].size() == 4u * 2u);
    CHECK(queries_by_split[Split::Test].size() == 4u * 3u);

    // every query has all model cells and an embedding
    for (const auto& [qid, indices] : world.corpus.by_query())
        CHECK(indices.size() == 3);
    for (const auto& r : world.corpus.records)
        CHECK(world.embedder->embed(r.query_text).size() == options.K);
}

TEST_CASE("with clean clusters and no noise the task-aware router dominates the "
          "regression-only router") {
    evalharness::WorldOptions options;
    options.K = 6;
    options.M = 3;
    options.noise_sigma = 0.0;
    options.train_per_type = 12;
    options.val_per_type = 4;
    options.test_per_type = 6;
    options.d_in = 24;
    options.embed_noise = 0.08;
    const auto world = evalharness::synthetic_world(23, options);

    router::TrainConfig train_config;
    train_config.lr = 3e-3;
    train_config.epochs = 50;
    train_config.batch_size = 32;
    train_config.patience = 10;
    train_config.seed = 23;
    router::RouterConfig config;
    config.d_latent = 24;
    config.hidden = 24;

    const auto data = router::build_training_data(world.corpus, world.taxonomy, world.model_ids,
                                                  *world.embedder);
    const auto params = router::train(data, config, train_config).params;
    const auto metric_params =
        baselines::metric_router_train(data, config.d_latent, config.hidden, train_config).params;

    const auto test_corpus = evalharness::filter_split(world.corpus, Split::Test);
    const auto trouter_report = evalharness::evaluate(
        [&](const RoutingContext& ctx, const catalog::PreferenceWeights& mu) {
            return router::infer(params, world.embedder->embed(ctx.query_text), mu).model_id;
        },
        test_corpus);
    const auto metric_report = evalharness::evaluate(
        [&](const RoutingContext& ctx, const catalog::PreferenceWeights& mu) {
            return baselines::metric_router_infer(metric_params,
                                                  world.embedder->embed(ctx.query_text), mu)
                .model_id;
        },
        test_corpus);
    CHECK(trouter_report.utility_sum >= metric_report.utility_sum);

    // with sigma = 0 the trained router's predictions approach the tables
    const auto profiles = world.taxonomy.flatten_difficulty();
    double worst_abs = 0.0;
    for (std::size_t t = 0; t < options.K; ++t) {
        const auto posterior =
            router::recognize(params, world.embedder->embed(profiles[t].rendered_text));
        for (std::size_t mdl = 0; mdl < options.M; ++mdl) {
            const double predicted = router::predict_metric(
                params, posterior, world.model_ids[mdl], router::Metric::Perf);
            worst_abs = std::max(worst_abs, std::abs(predicted - world.true_perf[t][mdl]));
        }
    }
    CHECK(worst_abs < 0.15);  // training tolerance at this tiny scale
}

TEST_CASE("limit_train_shots keeps the first N train queries per type") {
    evalharness::WorldOptions options;
    options.K = 3;
    options.M = 2;
    options.train_per_type = 6;
    options.val_per_type = 1;
    options.test_per_type = 1;
    const auto world = evalharness::synthetic_world(17, options);
    const auto limited = evalharness::limit_train_shots(world.corpus, 2);

    std::map<int, std::set<std::string>> train_queries;
    int val_records = 0;
    int test_records = 0;
    for (const auto& r : limited.records) {
        if (r.split == Split::Train)
            train_queries[*r.task_index].insert(r.query_id);
        else if (r.split == Split::Val)
            ++val_records;
        else
            ++test_records;
    }
    for (const auto& [type, queries] : train_queries) CHECK(queries.size() == 2);
    CHECK(val_records == 3 * 2);
    CHECK(test_records == 3 * 2);
}
