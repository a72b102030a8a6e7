#pragma once
// LTM construction: ingest -> dedup -> extract -> filter -> upsert, optionally
// driven by a bounded query-expansion loop over a literature source.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memforge/config.hpp"
#include "memforge/corpus.hpp"
#include "memforge/error.hpp"
#include "memforge/extraction.hpp"
#include "memforge/graph.hpp"

namespace memforge {

// Anything that can answer a SearchQuery with documents (PubMed, a fixture...).
class LiteratureSource {
public:
    virtual ~LiteratureSource() = default;
    virtual std::vector<Document> search(const SearchQuery& query) = 0;
};

// Remembers which canonical names were already issued as queries.
class QueryLedger {
public:
    bool issued(const std::string& name) const { return names_.count(name) != 0; }
    void mark(std::string name) { names_.insert(std::move(name)); }
    std::size_t size() const { return names_.size(); }

private:
    std::set<std::string> names_;
};

// One query per frontier entity whose canonical name has not been issued yet,
// sorted by name, each one level deeper. Nothing is expanded at max depth.
inline std::vector<SearchQuery> expand_queries(const KnowledgeGraph& graph,
                                               const std::set<std::string>& frontier, int depth,
                                               int max_depth, QueryLedger& ledger) {
    std::vector<SearchQuery> out;
    if (depth >= max_depth) return out;
    // std::set iteration is already sorted by canonical name.
    for (const std::string& id : frontier) {
        auto it = graph.entities().find(id);
        if (it == graph.entities().end()) continue;
        const std::string& name = it->second.id;
        if (ledger.issued(name)) continue;
        ledger.mark(name);
        out.push_back({name, depth + 1});
    }
    return out;
}

struct BuildReport {
    std::size_t docs_seen = 0;
    std::size_t deduped = 0;
    std::size_t docs_retained = 0;
    std::size_t extraction_failed = 0;
    std::size_t triples_extracted = 0;
    std::size_t triples_dropped = 0;  // malformed items from remote extractors
    std::size_t triples_retained = 0;
    std::size_t queries_issued = 0;
    std::map<std::string, std::size_t> retained_relations;
    std::size_t edges = 0;
    std::size_t entities = 0;

    nlohmann::json to_json() const {
        return {{"docs_seen", docs_seen},
                {"deduped", deduped},
                {"docs_retained", docs_retained},
                {"extraction_failed", extraction_failed},
                {"triples_extracted", triples_extracted},
                {"triples_dropped", triples_dropped},
                {"triples_retained", triples_retained},
                {"retained_relations", retained_relations},
                {"queries_issued", queries_issued},
                {"edges", edges},
                {"entities", entities}};
    }
};

class LtmBuilder {
public:
    LtmBuilder(double tau, FusionParams fusion, const ExtractorProvider& extractor,
               RelationSchema schema = RelationSchema::pathology(), SynonymTable synonyms = {},
               std::set<std::string> disease_lexicon = {})
        : tau_(tau),
          extractor_(&extractor),
          schema_(std::move(schema)),
          synonyms_(std::move(synonyms)),
          graph_(fusion, std::move(disease_lexicon)) {
        if (!(tau_ > 0.0 && tau_ < 1.0)) throw ConfigError("invalid_tau", "tau must lie in (0, 1)");
    }

    // Processes one batch and returns the canonical ids of entities it created.
    std::set<std::string> ingest(std::span<const Document> docs) {
        report_.docs_seen += docs.size();
        DedupResult dedup = dedup_batch(docs, memory_);
        memory_ = std::move(dedup.memory);
        report_.deduped += dedup.removed;
        report_.docs_retained += dedup.retained.size();

        std::vector<EvidenceTriple> candidates;
        for (const Document& doc : dedup.retained) {
            ExtractionOutcome outcome = extractor_->extract(doc, schema_);
            report_.triples_dropped += outcome.dropped;
            if (outcome.status == ExtractionStatus::Failed) {
                ++report_.extraction_failed;
                continue;
            }
            for (EvidenceTriple& t : outcome.triples) candidates.push_back(std::move(t));
        }
        // Merge order is by source digest so results never depend on scheduling.
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const EvidenceTriple& a, const EvidenceTriple& b) {
                             return a.source_digest < b.source_digest;
                         });
        report_.triples_extracted += candidates.size();

        const std::vector<EvidenceTriple> kept = filter_by_confidence(candidates, tau_);
        report_.triples_retained += kept.size();

        const std::set<std::string> before = entity_ids();
        for (const EvidenceTriple& t : kept) {
            try {
                graph_.upsert(t, synonyms_);
            } catch (const DataError& e) {
                if (e.code() != "empty_entity") throw;
                // Degenerate surface forms are skipped, not fatal.
                --report_.triples_retained;
                continue;
            }
            ++report_.retained_relations[t.relation];
        }
        std::set<std::string> created;
        for (const auto& [id, _] : graph_.entities()) {
            if (!before.count(id)) created.insert(id);
        }
        report_.edges = graph_.edges().size();
        report_.entities = graph_.entities().size();
        return created;
    }

    // Breadth-first expansion from a seed query, bounded by depth and budget.
    void run_search(const std::string& seed, LiteratureSource& source, int max_depth,
                    std::size_t query_budget) {
        QueryLedger ledger;
        std::deque<SearchQuery> pending;
        const std::string seed_name = normalize_text(seed);
        ledger.mark(seed_name.empty() ? seed : seed_name);
        pending.push_back({seed, 0});
        while (!pending.empty() && report_.queries_issued < query_budget) {
            SearchQuery q = std::move(pending.front());
            pending.pop_front();
            ++report_.queries_issued;
            const std::vector<Document> docs = source.search(q);
            const std::set<std::string> frontier = ingest(docs);
            for (SearchQuery& next : expand_queries(graph_, frontier, q.depth, max_depth, ledger)) {
                pending.push_back(std::move(next));
            }
        }
    }

    const KnowledgeGraph& graph() const { return graph_; }
    KnowledgeGraph take_graph() && { return std::move(graph_); }
    const HashMemory& memory() const { return memory_; }
    const BuildReport& report() const { return report_; }

private:
    std::set<std::string> entity_ids() const {
        std::set<std::string> ids;
        for (const auto& [id, _] : graph_.entities()) ids.insert(id);
        return ids;
    }

    double tau_;
    const ExtractorProvider* extractor_;
    RelationSchema schema_;
    SynonymTable synonyms_;
    KnowledgeGraph graph_;
    HashMemory memory_;
    BuildReport report_;
};

}  // namespace memforge
