#pragma once
// JSON views used by the CLI: activation reports, graph statistics and token
// matrix input.

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <string>

#include "memforge/activation.hpp"
#include "memforge/embedding.hpp"
#include "memforge/graph.hpp"
#include "memforge/matrix.hpp"
#include "memforge/memory_bank.hpp"

namespace memforge {

struct FullActivation {
    ActivationResult static_result;
    ActivationResult dynamic_result;
    ActivationResult fused;
};

inline FullActivation activate(const MemoryBank& bank, const Matrix& tokens,
                               const ActivationConfig& config) {
    if (tokens.cols() != bank.dimension()) {
        throw DataError("dimension_mismatch", "token dimension differs from the bank");
    }
    config.validate(bank.size(), bank.dimension());
    const Vector q = compute_query(tokens, config.epsilon);
    FullActivation out;
    out.static_result = static_activate(bank, q, config.cap_static);
    out.dynamic_result = dynamic_activate(bank, q, config);
    out.fused = adaptive_select(out.static_result, out.dynamic_result, config);
    return out;
}

// A text query becomes a single-token sequence holding its embedding.
inline Matrix tokens_from_text(std::string_view text, const EmbeddingProvider& provider) {
    const Vector v = provider.embed(text);
    return Matrix(1, v.size(), v);
}

// Accepts [[...], ...] or {"tokens": [[...], ...]}.
inline Matrix tokens_from_json(const nlohmann::json& j) {
    const nlohmann::json& rows = j.is_object() && j.contains("tokens") ? j.at("tokens") : j;
    if (!rows.is_array() || rows.empty()) {
        throw DataError("invalid_tokens", "token matrix must be a non-empty array of rows");
    }
    std::size_t d = 0;
    std::vector<double> data;
    for (const auto& row : rows) {
        if (!row.is_array()) throw DataError("invalid_tokens", "token rows must be arrays");
        if (d == 0) d = row.size();
        if (row.size() != d || d == 0) throw DataError("invalid_tokens", "ragged token matrix");
        for (const auto& x : row) {
            if (!x.is_number()) throw DataError("invalid_tokens", "token entries must be numbers");
            data.push_back(x.get<double>());
        }
    }
    return Matrix(rows.size(), d, std::move(data));
}

inline nlohmann::json activation_report(const FullActivation& act, const KnowledgeGraph& graph,
                                        const MemoryBank& bank, const ActivationConfig& config) {
    nlohmann::json entries = nlohmann::json::array();
    const ActivationResult& r = act.fused;
    for (std::size_t j = 0; j < r.indices.size(); ++j) {
        const EdgeKey& key = r.provenance.at(j);
        const Edge* edge = graph.find_edge(key);
        entries.push_back({{"rank", j},
                           {"index", r.indices[j]},
                           {"score", r.scores[j]},
                           {"source", std::string(to_string(r.sources[j]))},
                           {"edge", {{"subject", key.subject},
                                     {"relation", key.relation},
                                     {"object", key.object}}},
                           {"triple", key.to_string()},
                           {"weight", edge ? edge->fused_weight : 0.0}});
    }
    return {{"mode", std::string(to_string(r.mode))},
            {"caps", {{"dynamic", config.cap_dynamic}, {"static", config.cap_static}}},
            {"bank", {{"n", bank.size()}, {"d", bank.dimension()}, {"built_from", bank.built_from}}},
            {"degenerate_query", r.degenerate_query},
            {"entries", std::move(entries)}};
}

inline nlohmann::json graph_stats(const KnowledgeGraph& graph) {
    std::array<std::size_t, 10> histogram{};
    std::map<std::string, std::size_t> relations;
    for (const auto& [key, edge] : graph.edges()) {
        auto bin = static_cast<std::size_t>(std::floor(edge.fused_weight * 10.0));
        histogram[std::min<std::size_t>(bin, 9)]++;
        relations[key.relation]++;
    }
    std::size_t feature_count = 0;
    for (const auto& [_, e] : graph.entities()) {
        if (e.type == EntityType::Feature) ++feature_count;
    }
    return {{"entities", graph.entities().size()},
            {"edges", graph.edges().size()},
            {"evidence", graph.evidence_count()},
            {"diseases", graph.disease_nodes().size()},
            {"features", feature_count},
            {"relations", relations},
            {"weight_histogram",
             {{"bin_width", 0.1}, {"counts", histogram}}},
            {"fusion_params",
             {{"alpha", graph.fusion_params().alpha}, {"penalty_f", graph.fusion_params().penalty}}}};
}

}  // namespace memforge
