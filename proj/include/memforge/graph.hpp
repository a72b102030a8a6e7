#pragma once
// Long-term memory: a weighted directed multigraph over canonical entities.
//
// Edges are keyed by (subject, relation, object) after canonicalization and
// keep every supporting evidence instance. The fused weight of an edge is the
// noisy-or combination of its evidence, each instance attenuated by a global
// scale alpha and by how far its embedding sits from the evidence centroid:
//
//   w = 1 - prod_k (1 - alpha * c_k * exp(-F * ||z_k - mean(z)||^2))
//
// The inverted index maps every entity to the keys of the edges it touches.

#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memforge/digest.hpp"
#include "memforge/embedding.hpp"
#include "memforge/error.hpp"
#include "memforge/extraction.hpp"
#include "memforge/text.hpp"

namespace memforge {

enum class EntityType { Disease, Feature, Other };

inline std::string_view to_string(EntityType t) {
    switch (t) {
        case EntityType::Disease: return "Disease";
        case EntityType::Feature: return "Feature";
        case EntityType::Other: return "Other";
    }
    return "Other";
}

inline std::optional<EntityType> entity_type_from_string(std::string_view s) {
    if (s == "Disease") return EntityType::Disease;
    if (s == "Feature") return EntityType::Feature;
    if (s == "Other") return EntityType::Other;
    return std::nullopt;
}

struct Entity {
    std::string id;
    std::set<std::string> surface_forms;
    EntityType type = EntityType::Feature;

    bool operator==(const Entity&) const = default;
};

struct EdgeKey {
    std::string subject;
    std::string relation;
    std::string object;

    auto operator<=>(const EdgeKey&) const = default;

    std::string to_string() const { return render_triple(subject, relation, object); }
};

struct Evidence {
    double confidence = 0.0;
    Vector embedding;
    Digest source;

    bool operator==(const Evidence&) const = default;
};

struct Edge {
    EdgeKey key;
    double fused_weight = 0.0;
    std::vector<Evidence> evidence;

    bool operator==(const Edge&) const = default;
};

struct FusionParams {
    double alpha = 0.9;
    double penalty = 1.0;  // F

    bool operator==(const FusionParams&) const = default;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw ConfigError("invalid_alpha", "alpha must lie in (0, 1]");
        }
        if (!(penalty > 0.0) || !std::isfinite(penalty)) {
            throw ConfigError("invalid_penalty", "penalty F must be a positive finite number");
        }
    }
};

// alpha * c * exp(-F * ||z - center||^2): one evidence instance's share.
inline double effective_contribution(double confidence, std::span<const double> z,
                                     std::span<const double> center, const FusionParams& params) {
    return params.alpha * confidence * std::exp(-params.penalty * squared_distance(z, center));
}

inline double fuse_edge_weight(std::span<const Evidence> evidence, const FusionParams& params) {
    if (evidence.empty()) throw DataError("empty_evidence", "an edge needs at least one evidence");
    params.validate();
    std::vector<Vector> zs;
    zs.reserve(evidence.size());
    for (const Evidence& e : evidence) {
        if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
            throw DataError("invalid_confidence", "evidence confidence outside [0, 1]");
        }
        zs.push_back(e.embedding);
    }
    const Vector center = centroid(zs);
    // 1 - prod(1 - p_k), accumulated as w <- w + p(1 - w) so that a single
    // evidence returns alpha * c exactly.
    double w = 0.0;
    for (const Evidence& e : evidence) {
        const double p = effective_contribution(e.confidence, e.embedding, center, params);
        w += p * (1.0 - w);
    }
    return w;
}

using SynonymTable = std::map<std::string, std::string>;

// Normalizes both sides of a raw synonym mapping; entries that normalize to
// nothing are ignored.
inline SynonymTable make_synonym_table(const std::map<std::string, std::string>& raw) {
    SynonymTable table;
    for (const auto& [from, to] : raw) {
        std::string k = normalize_text(from);
        std::string v = normalize_text(to);
        if (k.empty() || v.empty()) continue;
        table[std::move(k)] = std::move(v);
    }
    return table;
}

// Canonical id for a surface form: normalized text, then synonym lookup.
inline std::string canonicalize_entity(std::string_view surface, const SynonymTable& synonyms) {
    std::string norm = normalize_text(surface);
    if (norm.empty()) {
        throw DataError("empty_entity", "entity '" + std::string(surface) +
                                            "' is empty after normalization");
    }
    if (auto it = synonyms.find(norm); it != synonyms.end()) return it->second;
    return norm;
}

struct IndexLookup {
    std::vector<EdgeKey> edges;
    bool known = false;  // false when the id is not an entity of the graph
};

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    explicit KnowledgeGraph(FusionParams params, std::set<std::string> disease_lexicon = {})
        : params_(params) {
        params_.validate();
        for (const std::string& name : disease_lexicon) {
            std::string n = normalize_text(name);
            if (!n.empty()) disease_lexicon_.insert(std::move(n));
        }
    }

    const FusionParams& fusion_params() const { return params_; }
    const std::set<std::string>& disease_lexicon() const { return disease_lexicon_; }
    const std::map<std::string, Entity>& entities() const { return entities_; }
    const std::map<EdgeKey, Edge>& edges() const { return edges_; }
    const std::map<std::string, std::string>& phi() const { return phi_; }
    const std::map<std::string, std::set<EdgeKey>>& psi() const { return psi_; }

    bool empty() const { return edges_.empty(); }

    std::size_t evidence_count() const {
        std::size_t n = 0;
        for (const auto& [_, e] : edges_) n += e.evidence.size();
        return n;
    }

    // Dimension shared by every stored evidence embedding (0 when empty).
    std::size_t embedding_dimension() const {
        return edges_.empty() ? 0 : edges_.begin()->second.evidence.front().embedding.size();
    }

    const Edge* find_edge(const EdgeKey& key) const {
        auto it = edges_.find(key);
        return it == edges_.end() ? nullptr : &it->second;
    }

    // Resolves a surface form and records it in phi and the entity's forms.
    std::string canonicalize(std::string_view surface, const SynonymTable& synonyms) {
        std::string id = canonicalize_entity(surface, synonyms);
        Entity& entity = entities_[id];
        if (entity.id.empty()) {
            entity.id = id;
            entity.type = disease_lexicon_.count(id) ? EntityType::Disease : EntityType::Feature;
        }
        entity.surface_forms.insert(std::string(surface));
        phi_[std::string(surface)] = id;
        return id;
    }

    // Appends the triple as evidence on its canonical edge and recomputes the
    // edge weight from the complete evidence list.
    const Edge& upsert(const EvidenceTriple& triple, const SynonymTable& synonyms) {
        if (!(triple.confidence >= 0.0 && triple.confidence <= 1.0)) {
            throw DataError("invalid_confidence", "triple confidence outside [0, 1]");
        }
        const std::size_t dim = embedding_dimension();
        if (dim != 0 && triple.embedding.size() != dim) {
            throw DataError("dimension_mismatch", "triple embedding dimension differs from graph");
        }
        // Canonicalize both ends before touching the graph so a rejected
        // object leaves no half-registered subject behind.
        const std::string s_id = canonicalize_entity(triple.subject, synonyms);
        const std::string o_id = canonicalize_entity(triple.object, synonyms);
        canonicalize(triple.subject, synonyms);
        canonicalize(triple.object, synonyms);

        EdgeKey key{s_id, triple.relation, o_id};
        Edge& edge = edges_[key];
        edge.key = key;
        edge.evidence.push_back({triple.confidence, triple.embedding, triple.source_digest});
        edge.fused_weight = fuse_edge_weight(edge.evidence, params_);
        psi_[s_id].insert(key);
        psi_[o_id].insert(key);
        return edge;
    }

    IndexLookup feature_index_lookup(std::string_view id) const {
        IndexLookup out;
        out.known = entities_.count(std::string(id)) != 0;
        if (auto it = psi_.find(std::string(id)); it != psi_.end()) {
            out.edges.assign(it->second.begin(), it->second.end());
        }
        return out;
    }

    std::set<std::string> disease_nodes() const {
        std::set<std::string> out;
        for (const auto& [id, e] : entities_) {
            if (e.type == EntityType::Disease) out.insert(id);
        }
        return out;
    }

    bool operator==(const KnowledgeGraph& other) const {
        return params_ == other.params_ && disease_lexicon_ == other.disease_lexicon_ &&
               entities_ == other.entities_ && edges_ == other.edges_ && phi_ == other.phi_ &&
               psi_ == other.psi_;
    }

    // Raw insertion used by the snapshot loader; call rebuild_index() after.
    void restore_entity(Entity e) { entities_[e.id] = std::move(e); }
    void restore_edge(Edge e) { edges_[e.key] = std::move(e); }
    void restore_phi(std::string surface, std::string id) { phi_[std::move(surface)] = std::move(id); }
    void restore_disease_lexicon(std::set<std::string> lex) { disease_lexicon_ = std::move(lex); }

    void rebuild_index() {
        psi_.clear();
        for (const auto& [key, _] : edges_) {
            psi_[key.subject].insert(key);
            psi_[key.object].insert(key);
        }
    }

private:
    FusionParams params_;
    std::set<std::string> disease_lexicon_;
    std::map<std::string, Entity> entities_;
    std::map<EdgeKey, Edge> edges_;
    std::map<std::string, std::string> phi_;
    std::map<std::string, std::set<EdgeKey>> psi_;
};

// Single-writer, multi-reader holder. Readers take an immutable view; writers
// mutate a private copy and publish it in one step.
class GraphStore {
public:
    explicit GraphStore(KnowledgeGraph initial = {})
        : current_(std::make_shared<const KnowledgeGraph>(std::move(initial))) {}

    std::shared_ptr<const KnowledgeGraph> view() const {
        std::lock_guard lock(ptr_mu_);
        return current_;
    }

    template <class Fn>
    void update(Fn&& fn) {
        std::lock_guard writer(write_mu_);
        auto next = std::make_shared<KnowledgeGraph>(*view());
        fn(*next);
        std::lock_guard lock(ptr_mu_);
        current_ = std::move(next);
    }

private:
    mutable std::mutex ptr_mu_;
    std::mutex write_mu_;
    std::shared_ptr<const KnowledgeGraph> current_;
};

}  // namespace memforge
