// memforge command-line interface.
//
//   memforge build        --corpus docs.jsonl | --query "seed" --out graph.json
//   memforge activate     --snapshot graph.json (--query text | --tokens x.json)
//   memforge eval         [--seed N --documents N --planted N --max-cap N]
//   memforge stats        --snapshot graph.json
//   memforge export-bank  --snapshot graph.json --out bank.bin [--format binary|json]
//   memforge print-config
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 network error, 5 internal.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "memforge/memforge.hpp"
#include "memforge/pubmed.hpp"
#include "memforge/remote_extractor.hpp"

namespace {

using namespace memforge;
using nlohmann::json;

struct ConfigFlags {
    std::string config_path;
    std::optional<double> tau, alpha, penalty_f, epsilon, relevance_floor;
    std::optional<std::size_t> dim, cap_dynamic, cap_static, query_budget;
    std::optional<int> max_depth;
    std::optional<std::string> disease_lexicon, synonym_table, extractor, llm_endpoint;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Flat JSON config file");
        app->add_option("--tau", tau, "Minimum triple confidence, in (0,1)");
        app->add_option("--alpha", alpha, "Fusion scale alpha, in (0,1]");
        app->add_option("--penalty-f", penalty_f, "Embedding-consistency penalty F > 0");
        app->add_option("--dim", dim, "Embedding dimension");
        app->add_option("--epsilon", epsilon, "Query normalization epsilon");
        app->add_option("--cap-dynamic", cap_dynamic, "Dynamic-activation token cap");
        app->add_option("--cap-static", cap_static, "Static-activation token cap");
        app->add_option("--relevance-floor", relevance_floor, "Drop WM entries scoring below this");
        app->add_option("--max-depth", max_depth, "Query expansion depth limit");
        app->add_option("--query-budget", query_budget, "Total literature queries allowed");
        app->add_option("--disease-lexicon", disease_lexicon, "Disease lexicon (one name per line)");
        app->add_option("--synonyms", synonym_table, "Synonym table (JSON object)");
        app->add_option("--extractor", extractor, "mock | remote");
        app->add_option("--llm-endpoint", llm_endpoint, "Remote extractor URL");
    }

    PipelineConfig resolve() const {
        PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (tau) c.tau = *tau;
        if (alpha) c.alpha = *alpha;
        if (penalty_f) c.penalty_f = *penalty_f;
        if (dim) c.dim = *dim;
        if (epsilon) c.epsilon = *epsilon;
        if (cap_dynamic) c.cap_dynamic = *cap_dynamic;
        if (cap_static) c.cap_static = *cap_static;
        if (relevance_floor) c.relevance_floor = *relevance_floor;
        if (max_depth) c.max_depth = *max_depth;
        if (query_budget) c.query_budget = *query_budget;
        if (disease_lexicon) c.disease_lexicon = *disease_lexicon;
        if (synonym_table) c.synonym_table = *synonym_table;
        if (extractor) c.extractor = *extractor;
        if (llm_endpoint) c.llm_endpoint = *llm_endpoint;
        c.validate();
        return c;
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("write_failed", "cannot open '" + out_path + "' for writing");
    out << text;
}

std::unique_ptr<ExtractorProvider> make_extractor(const PipelineConfig& c,
                                                  const EmbeddingProvider& embedder) {
    if (c.extractor == "remote") {
        if (c.llm_endpoint.empty()) {
            throw ConfigError("missing_llm_endpoint", "remote extractor needs llm_endpoint");
        }
        LlmEndpoint ep{c.llm_endpoint, LlmEndpoint::api_key_from_env(), c.llm_max_attempts,
                       std::chrono::milliseconds(c.llm_timeout_ms)};
        return std::make_unique<RemoteExtractor>(std::move(ep), embedder);
    }
    return std::make_unique<MockExtractor>(embedder);
}

KnowledgeGraph load_checked_snapshot(const std::string& path, const PipelineConfig& c) {
    KnowledgeGraph g = load_snapshot(path);
    if (g.empty()) throw DataError("empty_ltm", "empty LTM");
    if (g.embedding_dimension() != c.dim) {
        throw ConfigError("dimension_mismatch",
                          "snapshot embeddings have dimension " +
                              std::to_string(g.embedding_dimension()) + " but dim is " +
                              std::to_string(c.dim));
    }
    return g;
}

std::vector<double> load_mask(const std::string& path) {
    const json j = json::parse(read_file(path), nullptr, false);
    if (!j.is_array()) throw DataError("invalid_mask", "mask must be a JSON array");
    std::vector<double> mask;
    for (const auto& x : j) {
        if (x.is_number()) {
            mask.push_back(x.get<double>());
        } else if (x.is_string() && x.get<std::string>() == "-inf") {
            mask.push_back(-std::numeric_limits<double>::infinity());
        } else {
            throw DataError("invalid_mask", "mask entries must be numbers or \"-inf\"");
        }
    }
    return mask;
}

int run(int argc, char** argv) {
    CLI::App app{"memforge: literature-grounded knowledge graph memory"};
    app.require_subcommand(1);

    ConfigFlags flags;

    auto* build = app.add_subcommand("build", "Build the LTM snapshot from a corpus or a seed query");
    std::string corpus_path, seed_query, snapshot_out;
    build->add_option("--corpus", corpus_path, "JSON Lines corpus");
    build->add_option("--query", seed_query, "Seed query for PubMed search");
    build->add_option("--out", snapshot_out, "Snapshot output path")->required();
    flags.attach(build);

    auto* act = app.add_subcommand("activate", "Activate working memory for a query");
    std::string act_snapshot, act_query, act_tokens, act_mask, act_pq, act_pm, act_out;
    act->add_option("--snapshot", act_snapshot, "Snapshot path")->required();
    act->add_option("--query", act_query, "Query text");
    act->add_option("--tokens", act_tokens, "Token matrix JSON file");
    act->add_option("--mask", act_mask, "Mask JSON array (0 or \"-inf\" per bank row)");
    act->add_option("--projection-query", act_pq, "d x d query projection (bank binary layout)");
    act->add_option("--projection-memory", act_pm, "d x d memory projection (bank binary layout)");
    act->add_option("--out", act_out, "Report output path (default stdout)");
    flags.attach(act);

    auto* eval = app.add_subcommand("eval", "Planted-fact recall sweep over token caps");
    EvalSpec spec;
    std::string eval_out;
    eval->add_option("--seed", spec.seed, "Corpus seed");
    eval->add_option("--documents", spec.documents, "Documents in the synthetic corpus");
    eval->add_option("--planted", spec.planted, "Planted disease-feature facts");
    eval->add_option("--hard-negatives", spec.hard_negatives, "Distractors reusing planted diseases");
    eval->add_option("--max-cap", spec.max_cap, "Sweep caps 1..max-cap for each mode");
    eval->add_option("--out", eval_out, "CSV output path (default stdout)");
    flags.attach(eval);

    auto* stats = app.add_subcommand("stats", "Summarize a snapshot");
    std::string stats_snapshot;
    stats->add_option("--snapshot", stats_snapshot, "Snapshot path")->required();

    auto* exp = app.add_subcommand("export-bank", "Export the memory bank");
    std::string exp_snapshot, exp_out, exp_format = "binary";
    exp->add_option("--snapshot", exp_snapshot, "Snapshot path")->required();
    exp->add_option("--out", exp_out, "Output path")->required();
    exp->add_option("--format", exp_format, "binary | json")->check(CLI::IsMember({"binary", "json"}));
    flags.attach(exp);

    auto* print = app.add_subcommand("print-config", "Print the effective configuration");
    flags.attach(print);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
    }

    if (*print) {
        std::cout << config_to_json(flags.resolve()).dump(2) << "\n";
        return 0;
    }

    if (*stats) {
        std::cout << graph_stats(load_snapshot(stats_snapshot)).dump(2) << "\n";
        return 0;
    }

    if (*eval) {
        const PipelineConfig c = flags.resolve();
        std::ostringstream csv;
        write_eval_csv(csv, run_eval(spec, c));
        emit(csv.str(), eval_out);
        return 0;
    }

    const PipelineConfig c = flags.resolve();
    HashingEmbedder embedder(c.dim);

    if (*build) {
        if (corpus_path.empty() == seed_query.empty()) {
            throw ConfigError("invalid_source", "build needs exactly one of --corpus or --query");
        }
        std::set<std::string> lexicon;
        if (!c.disease_lexicon.empty()) lexicon = load_disease_lexicon(c.disease_lexicon);
        SynonymTable synonyms;
        if (!c.synonym_table.empty()) synonyms = load_synonym_table(c.synonym_table);
        auto extractor = make_extractor(c, embedder);
        LtmBuilder builder(c.tau, c.fusion(), *extractor, RelationSchema::pathology(),
                           std::move(synonyms), std::move(lexicon));
        if (!corpus_path.empty()) {
            std::ifstream in(corpus_path);
            if (!in) throw DataError("file_not_found", "cannot open corpus '" + corpus_path + "'");
            builder.ingest(read_corpus_jsonl(in));
        } else {
            PubMedOptions opts;
            opts.base_url = c.ncbi_base_url;
            opts.api_key = PubMedOptions::api_key_from_env();
            opts.retmax = c.ncbi_retmax;
            opts.requests_per_second = c.ncbi_requests_per_second;
            PubMedClient client(opts);
            builder.run_search(seed_query, client, c.max_depth, c.query_budget);
        }
        if (builder.graph().empty()) throw DataError("empty_ltm", "empty LTM");
        save_snapshot(builder.graph(), snapshot_out);
        std::cout << builder.report().to_json().dump(2) << "\n";
        return 0;
    }

    if (*act) {
        if (act_query.empty() == act_tokens.empty()) {
            throw ConfigError("invalid_query", "activate needs exactly one of --query or --tokens");
        }
        const KnowledgeGraph graph = load_checked_snapshot(act_snapshot, c);
        const MemoryBank bank = build_memory_bank(graph, embedder);
        ActivationConfig ac = c.activation();
        if (!act_mask.empty()) ac.mask = load_mask(act_mask);
        if (!act_pq.empty()) ac.projection_query = load_projection(act_pq);
        if (!act_pm.empty()) ac.projection_memory = load_projection(act_pm);
        Matrix tokens;
        if (!act_query.empty()) {
            tokens = tokens_from_text(act_query, embedder);
        } else {
            const json j = json::parse(read_file(act_tokens), nullptr, false);
            if (j.is_discarded()) throw DataError("invalid_tokens", "token file is not valid JSON");
            tokens = tokens_from_json(j);
        }
        const FullActivation result = activate(bank, tokens, ac);
        if (result.fused.empty()) throw DataError("empty_working_memory", "working memory is empty");
        emit(activation_report(result, graph, bank, ac).dump(2) + "\n", act_out);
        return 0;
    }

    if (*exp) {
        const KnowledgeGraph graph = load_checked_snapshot(exp_snapshot, c);
        const MemoryBank bank = build_memory_bank(graph, embedder);
        std::ofstream out(exp_out, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("write_failed", "cannot open '" + exp_out + "' for writing");
        if (exp_format == "json") {
            out << bank_to_json(bank).dump() << "\n";
        } else {
            write_bank_binary(out, bank);
        }
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const memforge::Error& e) {
        nlohmann::json err{{"error",
                            {{"code", e.code()},
                             {"category", e.exit_code()},
                             {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"code", "internal"}, {"category", 5}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 5;
    }
}
