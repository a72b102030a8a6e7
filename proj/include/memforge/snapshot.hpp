#pragma once
// JSON snapshot persistence for KnowledgeGraph.
//
// Layout: {"version", "fusion_params", "disease_lexicon", "entities", "edges",
// "phi"}. Evidence is stored inline on each edge; the inverted index is rebuilt
// on load. Doubles are written in shortest round-trip form.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "memforge/error.hpp"
#include "memforge/graph.hpp"

namespace memforge {

inline constexpr int kSnapshotVersion = 1;

inline nlohmann::json snapshot_to_json(const KnowledgeGraph& g) {
    using nlohmann::json;
    json entities = json::array();
    for (const auto& [id, e] : g.entities()) {
        entities.push_back({{"id", id},
                            {"type", std::string(to_string(e.type))},
                            {"surface_forms", e.surface_forms}});
    }
    json edges = json::array();
    for (const auto& [key, edge] : g.edges()) {
        json evidence = json::array();
        for (const Evidence& ev : edge.evidence) {
            evidence.push_back({{"c", ev.confidence}, {"z", ev.embedding}, {"source", ev.source.hex()}});
        }
        edges.push_back({{"subject", key.subject},
                         {"relation", key.relation},
                         {"object", key.object},
                         {"weight", edge.fused_weight},
                         {"evidence", std::move(evidence)}});
    }
    return json{{"version", kSnapshotVersion},
                {"fusion_params",
                 {{"alpha", g.fusion_params().alpha}, {"penalty_f", g.fusion_params().penalty}}},
                {"disease_lexicon", g.disease_lexicon()},
                {"entities", std::move(entities)},
                {"edges", std::move(edges)},
                {"phi", g.phi()}};
}

inline std::string snapshot_to_string(const KnowledgeGraph& g) {
    return snapshot_to_json(g).dump() + "\n";
}

inline KnowledgeGraph snapshot_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
        throw CorruptSnapshotError("snapshot has no integer 'version'");
    }
    const auto version = doc["version"].get<long long>();
    if (version != kSnapshotVersion) {
        throw VersionMismatchError("snapshot version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(kSnapshotVersion) + ")");
    }
    try {
        const json& fp = doc.at("fusion_params");
        FusionParams params{fp.at("alpha").get<double>(), fp.at("penalty_f").get<double>()};
        KnowledgeGraph g(params);
        g.restore_disease_lexicon(doc.at("disease_lexicon").get<std::set<std::string>>());

        for (const json& e : doc.at("entities")) {
            Entity entity;
            entity.id = e.at("id").get<std::string>();
            auto type = entity_type_from_string(e.at("type").get<std::string>());
            if (!type) throw CorruptSnapshotError("unknown entity type for '" + entity.id + "'");
            entity.type = *type;
            entity.surface_forms = e.at("surface_forms").get<std::set<std::string>>();
            g.restore_entity(std::move(entity));
        }

        std::size_t dim = 0;
        for (const json& e : doc.at("edges")) {
            Edge edge;
            edge.key = {e.at("subject").get<std::string>(), e.at("relation").get<std::string>(),
                        e.at("object").get<std::string>()};
            edge.fused_weight = e.at("weight").get<double>();
            for (const json& ev : e.at("evidence")) {
                Evidence evidence;
                evidence.confidence = ev.at("c").get<double>();
                evidence.embedding = ev.at("z").get<Vector>();
                auto digest = Digest::from_hex(ev.at("source").get<std::string>());
                if (!digest) throw CorruptSnapshotError("bad evidence source digest");
                evidence.source = *digest;
                if (dim == 0) dim = evidence.embedding.size();
                if (evidence.embedding.size() != dim) {
                    throw CorruptSnapshotError("evidence embeddings have mixed dimensions");
                }
                edge.evidence.push_back(std::move(evidence));
            }
            if (edge.evidence.empty()) {
                throw CorruptSnapshotError("edge '" + edge.key.to_string() + "' has no evidence");
            }
            if (!g.entities().count(edge.key.subject) || !g.entities().count(edge.key.object)) {
                throw CorruptSnapshotError("edge '" + edge.key.to_string() +
                                           "' references an unknown entity");
            }
            const double recomputed = fuse_edge_weight(edge.evidence, params);
            if (std::abs(recomputed - edge.fused_weight) > 1e-12) {
                throw CorruptSnapshotError("edge '" + edge.key.to_string() +
                                           "' weight disagrees with its evidence");
            }
            g.restore_edge(std::move(edge));
        }

        for (const auto& [surface, id] : doc.at("phi").items()) {
            g.restore_phi(surface, id.get<std::string>());
        }
        g.rebuild_index();
        return g;
    } catch (const json::exception& e) {
        throw CorruptSnapshotError(std::string("malformed snapshot: ") + e.what());
    } catch (const ConfigError& e) {
        throw CorruptSnapshotError(std::string("invalid snapshot parameters: ") + e.what());
    } catch (const DataError& e) {
        if (dynamic_cast<const CorruptSnapshotError*>(&e)) throw;
        throw CorruptSnapshotError(std::string("invalid snapshot contents: ") + e.what());
    }
}

inline KnowledgeGraph snapshot_from_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CorruptSnapshotError(std::string("snapshot is not valid JSON: ") + e.what());
    }
    return snapshot_from_json(doc);
}

inline void save_snapshot(const KnowledgeGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("write_failed", "cannot open '" + path.string() + "' for writing");
    out << snapshot_to_string(g);
    if (!out) throw DataError("write_failed", "failed writing '" + path.string() + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("file_not_found", "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline KnowledgeGraph load_snapshot(const std::filesystem::path& path) {
    return snapshot_from_string(read_file(path));
}

}  // namespace memforge
