#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trouter/baselines.hpp"
#include "trouter/catalog.hpp"
#include "trouter/datakit.hpp"
#include "trouter/embedding.hpp"
#include "trouter/evalharness.hpp"
#include "trouter/prompts.hpp"
#include "trouter/router.hpp"
#include "trouter/synthesis.hpp"
#include "trouter/taxonomy.hpp"

namespace py = pybind11;
using namespace trouter;

namespace {

/// File-level training entry point mirroring the CLI `train` subcommand.
double train_files(const std::string& corpus_path, const std::string& taxonomy_path,
                   const std::string& pool_path, const std::string& out_path, std::uint64_t seed,
                   double lr, int epochs, int batch_size, int patience, std::size_t d_latent,
                   std::size_t hidden, double tau, std::size_t embed_dim,
                   std::uint64_t embed_seed) {
    const auto corpus = datakit::Corpus::load(corpus_path);
    const auto taxonomy = taxonomy::Taxonomy::load(taxonomy_path);
    const auto pool = catalog::ModelPool::load(pool_path);

    std::vector<std::string> model_ids;
    for (const auto& m : pool.models()) model_ids.push_back(m.model_id);

    router::EmbedderSpec spec{"hash_projection", embed_dim, embed_seed};
    auto embedder = router::make_embedder(spec);
    const auto data = router::build_training_data(corpus, taxonomy, model_ids, *embedder);

    router::RouterConfig config;
    config.d_latent = d_latent;
    config.hidden = hidden;
    config.tau = tau;

    router::TrainConfig train_config;
    train_config.lr = lr;
    train_config.epochs = epochs;
    train_config.batch_size = batch_size;
    train_config.patience = patience;
    train_config.seed = seed;

    auto result = router::train(data, config, train_config);
    result.params.taxonomy_hash = taxonomy.stable_hash();
    result.params.embedder = spec;
    result.params.save(out_path);
    return result.train_losses.back();
}

py::dict infer_to_dict(const router::RouterParams& params, const router::InferResult& result,
                       const catalog::PreferenceWeights& mu) {
    py::dict out;
    out["model_id"] = result.model_id;
    py::dict per_model;
    for (const auto& [id, pair] : result.per_model) {
        py::dict entry;
        entry["perf"] = pair.perf_norm;
        entry["cost"] = pair.cost_norm;
        entry["utility"] = catalog::utility(mu, pair.perf_norm, pair.cost_norm);
        per_model[py::str(id)] = entry;
    }
    out["per_model"] = per_model;
    py::list topk;
    for (const auto& [profile_id, prob] : router::posterior_topk(params, result.posterior, 5)) {
        py::dict entry;
        entry["profile_id"] = profile_id;
        entry["probability"] = prob;
        topk.append(entry);
    }
    out["posterior_topk"] = topk;
    return out;
}

}  // namespace

PYBIND11_MODULE(_trouter, m) {
    m.doc() = "Task-type-aware LLM routing: cost/utility arithmetic, taxonomy handling, "
              "dedup filtering, and trained-router inference.";

    py::register_exception<RouterError>(m, "RouterError");

    py::class_<catalog::PreferenceWeights>(m, "PreferenceWeights")
        .def(py::init<double, double>(), py::arg("mu_r"), py::arg("mu_c"))
        .def_static("from_mu_r", &catalog::PreferenceWeights::from_mu_r, py::arg("mu_r"))
        .def_property_readonly("mu_r", &catalog::PreferenceWeights::mu_r)
        .def_property_readonly("mu_c", &catalog::PreferenceWeights::mu_c);

    m.def(
        "compute_cost",
        [](double input_price, double output_price, std::uint64_t input_tokens,
           std::uint64_t output_tokens) {
            catalog::ModelSpec spec{"m", "", std::nullopt, input_price, output_price};
            return catalog::compute_cost(spec, {input_tokens, output_tokens});
        },
        py::arg("input_price"), py::arg("output_price"), py::arg("input_tokens"),
        py::arg("output_tokens"),
        "Token-priced cost: (in * input_price + out * output_price) / 1e6.");

    m.def(
        "utility",
        [](double mu_r, double perf_norm, double cost_norm) {
            return catalog::utility(catalog::PreferenceWeights::from_mu_r(mu_r), perf_norm,
                                    cost_norm);
        },
        py::arg("mu_r"), py::arg("perf_norm"), py::arg("cost_norm"),
        "mu_r * perf - (1 - mu_r) * cost on normalized metrics.");

    m.def(
        "select_best",
        [](double mu_r, const std::map<std::string, std::pair<double, double>>& per_model) {
            std::map<std::string, catalog::MetricPair> metrics;
            for (const auto& [id, pair] : per_model) metrics[id] = {pair.first, pair.second};
            return catalog::select_best(catalog::PreferenceWeights::from_mu_r(mu_r), metrics);
        },
        py::arg("mu_r"), py::arg("per_model"),
        "Utility argmax over {model_id: (perf_norm, cost_norm)}; ties break on lower cost, "
        "then id.");

    py::class_<taxonomy::TaskProfile>(m, "TaskProfile")
        .def_readonly("profile_id", &taxonomy::TaskProfile::profile_id)
        .def_readonly("domain_name", &taxonomy::TaskProfile::domain_name)
        .def_readonly("subcategory_name", &taxonomy::TaskProfile::subcategory_name)
        .def_readonly("difficulty_name", &taxonomy::TaskProfile::difficulty_name)
        .def_readonly("rendered_text", &taxonomy::TaskProfile::rendered_text);

    py::class_<taxonomy::Taxonomy>(m, "Taxonomy")
        .def_static("load", &taxonomy::Taxonomy::load, py::arg("path"))
        .def_static("from_json_text", &taxonomy::Taxonomy::from_json_text, py::arg("text"))
        .def("to_json_text", &taxonomy::Taxonomy::to_json_text)
        .def("save", &taxonomy::Taxonomy::save, py::arg("path"))
        .def("flatten_difficulty", &taxonomy::Taxonomy::flatten_difficulty)
        .def("difficulty_count", &taxonomy::Taxonomy::difficulty_count)
        .def("stable_hash", &taxonomy::Taxonomy::stable_hash);

    py::class_<embedding::HashProjectionEmbedder>(m, "HashProjectionEmbedder")
        .def(py::init<std::size_t, std::uint64_t>(), py::arg("dim") = 64, py::arg("seed") = 1)
        .def("embed", &embedding::HashProjectionEmbedder::embed, py::arg("text"))
        .def_property_readonly("dim", &embedding::HashProjectionEmbedder::dim);

    m.def("cosine_similarity", &embedding::cosine_similarity, py::arg("a"), py::arg("b"));

    m.def(
        "dedup_indices",
        [](const std::vector<std::vector<double>>& fresh,
           const std::vector<std::vector<double>>& kept, double threshold) {
            std::vector<synthesis::QaPair> fresh_pairs;
            for (std::size_t i = 0; i < fresh.size(); ++i)
                fresh_pairs.push_back({std::to_string(i), "a", "p", fresh[i]});
            std::vector<synthesis::QaPair> kept_pairs;
            for (const auto& vec : kept) kept_pairs.push_back({"k", "a", "p", vec});
            std::vector<std::size_t> indices;
            for (const auto& pair : synthesis::dedup_filter(fresh_pairs, kept_pairs, threshold))
                indices.push_back(std::stoull(pair.question));
            return indices;
        },
        py::arg("fresh"), py::arg("kept") = std::vector<std::vector<double>>{},
        py::arg("threshold") = 0.9,
        "Indices of `fresh` embeddings that survive the near-duplicate filter.");

    m.def("render_judge_prompt", &prompts::render_judge_prompt, py::arg("question"),
          py::arg("reference_answer"), py::arg("response"));
    m.def(
        "render_qa_prompt",
        [](const taxonomy::TaskProfile& profile, int question_num) {
            return prompts::render_qa_prompt(profile.rendered_text, question_num);
        },
        py::arg("profile"), py::arg("question_num") = 8);

    m.def(
        "elbo_check",
        [](const std::vector<double>& prior, const std::vector<double>& likelihood,
           const std::vector<double>& variational) {
            const auto report = router::elbo_check({prior, likelihood, variational});
            return py::make_tuple(report.elbo, report.log_likelihood, report.gap);
        },
        py::arg("prior"), py::arg("likelihood"), py::arg("variational"),
        "Returns (elbo, log_likelihood, gap) for a discrete instance.");
    m.def(
        "exact_posterior",
        [](const std::vector<double>& prior, const std::vector<double>& likelihood) {
            return router::exact_posterior({prior, likelihood, {}});
        },
        py::arg("prior"), py::arg("likelihood"));

    py::class_<router::RouterParams>(m, "Router")
        .def_static(
            "load",
            [](const std::string& path) { return router::RouterParams::load(path); },
            py::arg("path"))
        .def_property_readonly("model_ids",
                               [](const router::RouterParams& p) { return p.model_ids; })
        .def_property_readonly("taxonomy_hash",
                               [](const router::RouterParams& p) { return p.taxonomy_hash; })
        .def("snapshot_hash", &router::RouterParams::snapshot_hash)
        .def(
            "route",
            [](const router::RouterParams& params, const std::string& query, double mu_r) {
                const auto mu = catalog::PreferenceWeights::from_mu_r(mu_r);
                const auto embedder = router::make_embedder(params.embedder);
                return infer_to_dict(params, router::infer(params, embedder->embed(query), mu),
                                     mu);
            },
            py::arg("query"), py::arg("mu_r") = 0.5,
            "Full routing decision for one query: chosen model, per-model predictions, "
            "posterior top-5.");

    m.def("train_files", &train_files, py::arg("corpus_path"), py::arg("taxonomy_path"),
          py::arg("pool_path"), py::arg("out_path"), py::arg("seed") = 1,
          py::arg("lr") = 1e-4, py::arg("epochs") = 200, py::arg("batch_size") = 64,
          py::arg("patience") = 10, py::arg("d_latent") = 256, py::arg("hidden") = 256,
          py::arg("tau") = 0.07, py::arg("embed_dim") = 64, py::arg("embed_seed") = 1,
          "Train a router from corpus/taxonomy/pool files and write the snapshot; returns "
          "the final training loss.");

    m.def(
        "smallest",
        [](const std::string& pool_path) {
            return baselines::smallest(catalog::ModelPool::load(pool_path).models());
        },
        py::arg("pool_path"));
    m.def(
        "largest",
        [](const std::string& pool_path) {
            return baselines::largest(catalog::ModelPool::load(pool_path).models());
        },
        py::arg("pool_path"));
}
