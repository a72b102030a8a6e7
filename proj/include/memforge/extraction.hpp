#pragma once
// Candidate evidence triples, the relation schema, the extractor interface and
// the confidence filter.

#include <algorithm>
#include <array>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memforge/corpus.hpp"
#include "memforge/embedding.hpp"
#include "memforge/error.hpp"

namespace memforge {

struct EvidenceTriple {
    std::string subject;
    std::string relation;
    std::string object;
    double confidence = 0.0;
    Vector embedding;
    Digest source_digest;
};

// Text the embedding provider sees for a triple.
inline std::string render_triple(std::string_view s, std::string_view r, std::string_view o) {
    std::string out;
    out.reserve(s.size() + r.size() + o.size() + 2);
    out.append(s).append(" ").append(r).append(" ").append(o);
    return out;
}

class RelationSchema {
public:
    explicit RelationSchema(std::vector<std::string> relations) : relations_(std::move(relations)) {
        if (relations_.empty()) throw ConfigError("empty_schema", "relation schema is empty");
        std::vector<std::string> sorted = relations_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("duplicate_relation", "relation schema has duplicate names");
        }
    }

    static RelationSchema pathology() {
        return RelationSchema({"EXHIBITS_FEATURE", "ASSOCIATED_WITH", "INDICATES", "GRADED_AS",
                               "LOCATED_IN"});
    }

    bool contains(std::string_view r) const {
        return std::find(relations_.begin(), relations_.end(), r) != relations_.end();
    }
    const std::vector<std::string>& relations() const { return relations_; }

private:
    std::vector<std::string> relations_;
};

enum class ExtractionStatus { Ok, Failed };

struct ExtractionOutcome {
    ExtractionStatus status = ExtractionStatus::Ok;
    std::vector<EvidenceTriple> triples;
    std::size_t dropped = 0;   // malformed or out-of-schema items
    std::size_t attempts = 0;  // remote calls made (0 for local extractors)
    std::string error;
};

class ExtractorProvider {
public:
    virtual ~ExtractorProvider() = default;
    virtual ExtractionOutcome extract(const Document& doc, const RelationSchema& schema) const = 0;
};

// Splits on '.', '!' or '?' followed by whitespace or end of text.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool boundary = i + 1 == text.size() ||
                              std::isspace(static_cast<unsigned char>(text[i + 1])) != 0;
        if (!boundary) continue;
        out.emplace_back(text.substr(start, i + 1 - start));
        start = i + 1;
    }
    if (start < text.size()) out.emplace_back(text.substr(start));
    return out;
}

// Deterministic pattern extractor standing in for an LLM.
class MockExtractor final : public ExtractorProvider {
public:
    explicit MockExtractor(const EmbeddingProvider& embedder) : embedder_(&embedder) {}

    ExtractionOutcome extract(const Document& doc, const RelationSchema& schema) const override {
        struct Pattern {
            std::string_view infix;
            std::string_view relation;
            double confidence;
        };
        static constexpr std::array<Pattern, 3> kPatterns{{
            {" shows ", "EXHIBITS_FEATURE", 0.9},
            {" is associated with ", "ASSOCIATED_WITH", 0.8},
            {" indicates ", "INDICATES", 0.85},
        }};

        ExtractionOutcome out;
        for (const std::string& sentence : split_sentences(doc.raw_text)) {
            const std::string norm = normalize_text(sentence);
            for (const Pattern& p : kPatterns) {
                const auto pos = norm.find(p.infix);
                if (pos == std::string::npos) continue;
                if (!schema.contains(p.relation)) continue;
                std::string subject = norm.substr(0, pos);
                std::string object = norm.substr(pos + p.infix.size());
                if (subject.empty() || object.empty()) continue;
                EvidenceTriple t;
                t.relation = std::string(p.relation);
                t.confidence = p.confidence;
                t.embedding = embedder_->embed(render_triple(subject, t.relation, object));
                t.subject = std::move(subject);
                t.object = std::move(object);
                t.source_digest = doc.digest;
                out.triples.push_back(std::move(t));
                break;
            }
        }
        return out;
    }

private:
    const EmbeddingProvider* embedder_;
};

// Keeps triples with confidence >= tau, preserving order.
inline std::vector<EvidenceTriple> filter_by_confidence(std::span<const EvidenceTriple> triples,
                                                        double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ConfigError("invalid_tau", "confidence threshold must lie in (0, 1)");
    }
    std::vector<EvidenceTriple> kept;
    for (const EvidenceTriple& t : triples) {
        if (t.confidence >= tau) kept.push_back(t);
    }
    return kept;
}

}  // namespace memforge
