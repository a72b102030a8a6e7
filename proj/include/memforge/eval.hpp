#pragma once
// Synthetic planted-fact retrieval harness.
//
// Generates a corpus of planted disease-feature facts mixed with distractor
// facts over pseudo-word entities, builds the LTM with the mock extractor,
// then queries with each planted feature and records whether the planted edge
// lands in the fused working memory for every (cap_D, cap_S) pair.

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "memforge/config.hpp"
#include "memforge/corpus.hpp"
#include "memforge/embedding.hpp"
#include "memforge/memory_bank.hpp"
#include "memforge/pipeline.hpp"
#include "memforge/report.hpp"

namespace memforge {

// splitmix64; fully specified so corpora are identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t state_;
};

struct EvalSpec {
    std::uint64_t seed = 7;
    std::size_t documents = 50;
    std::size_t planted = 5;
    std::size_t hard_negatives = 0;  // distractors reusing a planted disease
    std::size_t max_cap = 5;
};

struct PlantedFact {
    std::string disease;
    std::string feature;
};

struct SyntheticCorpus {
    std::vector<Document> documents;
    std::vector<PlantedFact> planted;
    std::set<std::string> disease_lexicon;
};

namespace detail {

inline const std::vector<std::string>& planted_diseases() {
    static const std::vector<std::string> v{
        "glioblastoma",           "lung adenocarcinoma",         "clear cell renal cell carcinoma",
        "papillary thyroid carcinoma", "hepatocellular carcinoma", "colorectal adenocarcinoma",
        "invasive ductal carcinoma", "cutaneous melanoma",        "pancreatic ductal adenocarcinoma",
        "urothelial carcinoma",   "prostatic adenocarcinoma",    "endometrioid carcinoma"};
    return v;
}

inline const std::vector<std::string>& planted_features() {
    static const std::vector<std::string> v{
        "pseudopalisading necrosis", "lepidic growth pattern", "optically clear cytoplasm",
        "nuclear grooves",           "trabecular architecture", "dirty luminal necrosis",
        "tubule formation",          "epithelioid melanocytes", "desmoplastic stroma",
        "papillary fronds",          "cribriform glands",       "squamous morules"};
    return v;
}

inline std::string pseudo_word(SplitMix64& rng) {
    static const char* kOnset[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
    static const char* kVowel[] = {"a", "e", "i", "o", "u"};
    std::string w;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t i = 0; i < syllables; ++i) {
        w += kOnset[rng.below(std::size(kOnset))];
        w += kVowel[rng.below(std::size(kVowel))];
    }
    return w;
}

inline std::string pseudo_entity(SplitMix64& rng) {
    std::string e = pseudo_word(rng);
    if (rng.below(2) == 1) e += " " + pseudo_word(rng);
    return e;
}

}  // namespace detail

inline SyntheticCorpus generate_corpus(const EvalSpec& spec) {
    const auto& diseases = detail::planted_diseases();
    const auto& features = detail::planted_features();
    if (spec.planted == 0 || spec.planted > diseases.size()) {
        throw ConfigError("invalid_eval_spec", "planted facts must be between 1 and " +
                                                   std::to_string(diseases.size()));
    }
    if (spec.documents < spec.planted) {
        throw ConfigError("invalid_eval_spec", "documents must be at least the planted count");
    }
    if (spec.hard_negatives > spec.documents - spec.planted) {
        throw ConfigError("invalid_eval_spec", "too many hard negatives for the distractor count");
    }

    SplitMix64 rng(spec.seed);
    auto shuffled = [&](std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        return idx;
    };
    const auto d_order = shuffled(diseases.size());
    const auto f_order = shuffled(features.size());

    SyntheticCorpus corpus;
    std::vector<std::string> sentences;
    std::set<std::string> used;
    for (std::size_t i = 0; i < spec.planted; ++i) {
        PlantedFact fact{diseases[d_order[i]], features[f_order[i]]};
        sentences.push_back(fact.disease + " shows " + fact.feature + ".");
        corpus.disease_lexicon.insert(fact.disease);
        corpus.planted.push_back(std::move(fact));
    }
    static const char* kInfix[] = {" shows ", " is associated with ", " indicates "};
    const std::size_t distractors = spec.documents - spec.planted;
    for (std::size_t i = 0; i < distractors;) {
        std::string subject = i < spec.hard_negatives
                                  ? corpus.planted[rng.below(corpus.planted.size())].disease
                                  : detail::pseudo_entity(rng);
        std::string object = detail::pseudo_entity(rng);
        std::string s = subject + kInfix[rng.below(3)] + object + ".";
        if (!used.insert(s).second) continue;
        sentences.push_back(std::move(s));
        ++i;
    }
    const auto order = shuffled(sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        corpus.documents.push_back(
            make_document("synth-" + std::to_string(i), sentences[order[i]]));
    }
    return corpus;
}

struct EvalRow {
    std::size_t cap_dynamic = 0;
    std::size_t cap_static = 0;
    double recall = 0.0;
    double mean_score = 0.0;
};

// Sweeps caps 1..max_cap for both modes. mean_score is the fused score of the
// planted entry averaged over planted queries, counting misses as 0.
inline std::vector<EvalRow> run_eval(const EvalSpec& spec, const PipelineConfig& config) {
    config.validate();
    if (spec.max_cap < 1) throw ConfigError("invalid_eval_spec", "max_cap must be >= 1");
    const SyntheticCorpus corpus = generate_corpus(spec);
    HashingEmbedder embedder(config.dim);
    MockExtractor extractor(embedder);
    LtmBuilder builder(config.tau, config.fusion(), extractor, RelationSchema::pathology(), {},
                       corpus.disease_lexicon);
    builder.ingest(corpus.documents);
    const KnowledgeGraph& graph = builder.graph();
    const MemoryBank bank = build_memory_bank(graph, embedder);

    std::vector<Matrix> queries;
    std::vector<EdgeKey> targets;
    for (const PlantedFact& f : corpus.planted) {
        queries.push_back(tokens_from_text(f.feature, embedder));
        targets.push_back({normalize_text(f.disease), "EXHIBITS_FEATURE", normalize_text(f.feature)});
    }

    std::vector<EvalRow> rows;
    for (std::size_t cd = 1; cd <= spec.max_cap; ++cd) {
        for (std::size_t cs = 1; cs <= spec.max_cap; ++cs) {
            ActivationConfig ac = config.activation();
            ac.cap_dynamic = cd;
            ac.cap_static = cs;
            std::size_t hits = 0;
            double score_sum = 0.0;
            for (std::size_t i = 0; i < queries.size(); ++i) {
                const FullActivation act = activate(bank, queries[i], ac);
                for (std::size_t j = 0; j < act.fused.provenance.size(); ++j) {
                    if (act.fused.provenance[j] == targets[i]) {
                        ++hits;
                        score_sum += act.fused.scores[j];
                        break;
                    }
                }
            }
            const double n = static_cast<double>(queries.size());
            rows.push_back({cd, cs, static_cast<double>(hits) / n, score_sum / n});
        }
    }
    return rows;
}

inline void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
    out << "cap_D,cap_S,recall,mean_score\n";
    for (const EvalRow& r : rows) {
        out << r.cap_dynamic << ',' << r.cap_static << ',' << nlohmann::json(r.recall).dump() << ','
            << nlohmann::json(r.mean_score).dump() << '\n';
    }
}

}  // namespace memforge
