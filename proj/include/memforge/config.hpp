#pragma once
// Flat JSON pipeline configuration. Unknown keys are rejected; every default
// is printable and re-ingestible unchanged.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>

#include "memforge/activation.hpp"
#include "memforge/error.hpp"
#include "memforge/graph.hpp"

namespace memforge {

struct PipelineConfig {
    double tau = 0.5;
    double alpha = 0.9;
    double penalty_f = 1.0;
    std::size_t dim = 256;
    double epsilon = 1e-8;
    std::size_t cap_dynamic = 5;
    std::size_t cap_static = 5;
    std::optional<double> relevance_floor;
    int max_depth = 2;
    std::size_t query_budget = 100;
    std::string disease_lexicon;  // path, empty for none
    std::string synonym_table;    // path, empty for none
    std::string extractor = "mock";
    std::string embedding = "builtin";
    std::string llm_endpoint;
    int llm_max_attempts = 3;
    int llm_timeout_ms = 30000;
    std::string ncbi_base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
    int ncbi_retmax = 20;
    double ncbi_requests_per_second = 3.0;

    FusionParams fusion() const { return {alpha, penalty_f}; }

    ActivationConfig activation() const {
        ActivationConfig a;
        a.epsilon = epsilon;
        a.cap_dynamic = cap_dynamic;
        a.cap_static = cap_static;
        a.relevance_floor = relevance_floor;
        return a;
    }

    void validate() const {
        if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("invalid_tau", "tau must lie in (0, 1)");
        fusion().validate();
        if (dim < 2) throw ConfigError("invalid_dimension", "dim must be >= 2");
        if (!(epsilon >= 0.0)) throw ConfigError("invalid_epsilon", "epsilon must be >= 0");
        if (cap_dynamic < 1 || cap_static < 1) throw ConfigError("invalid_cap", "caps must be >= 1");
        if (relevance_floor && !(*relevance_floor >= 0.0 && *relevance_floor <= 1.0)) {
            throw ConfigError("invalid_floor", "relevance_floor must lie in [0, 1]");
        }
        if (max_depth < 0) throw ConfigError("invalid_max_depth", "max_depth must be >= 0");
        if (extractor != "mock" && extractor != "remote") {
            throw ConfigError("invalid_extractor", "extractor must be 'mock' or 'remote'");
        }
        if (embedding != "builtin") {
            throw ConfigError("invalid_embedding", "embedding must be 'builtin'");
        }
        if (llm_max_attempts < 1) throw ConfigError("invalid_attempts", "llm_max_attempts must be >= 1");
        if (llm_timeout_ms < 1) throw ConfigError("invalid_timeout", "llm_timeout_ms must be >= 1");
        if (ncbi_retmax < 1) throw ConfigError("invalid_retmax", "ncbi_retmax must be >= 1");
        if (!(ncbi_requests_per_second > 0.0)) {
            throw ConfigError("invalid_rate", "ncbi_requests_per_second must be > 0");
        }
    }
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j{{"tau", c.tau},
                     {"alpha", c.alpha},
                     {"penalty_f", c.penalty_f},
                     {"dim", c.dim},
                     {"epsilon", c.epsilon},
                     {"cap_dynamic", c.cap_dynamic},
                     {"cap_static", c.cap_static},
                     {"relevance_floor", nullptr},
                     {"max_depth", c.max_depth},
                     {"query_budget", c.query_budget},
                     {"disease_lexicon", c.disease_lexicon},
                     {"synonym_table", c.synonym_table},
                     {"extractor", c.extractor},
                     {"embedding", c.embedding},
                     {"llm_endpoint", c.llm_endpoint},
                     {"llm_max_attempts", c.llm_max_attempts},
                     {"llm_timeout_ms", c.llm_timeout_ms},
                     {"ncbi_base_url", c.ncbi_base_url},
                     {"ncbi_retmax", c.ncbi_retmax},
                     {"ncbi_requests_per_second", c.ncbi_requests_per_second}};
    if (c.relevance_floor) j["relevance_floor"] = *c.relevance_floor;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config_not_object", "config must be a JSON object");
    static const std::set<std::string> kKnown = [] {
        std::set<std::string> keys;
        const nlohmann::json defaults = config_to_json(PipelineConfig{});
        for (const auto& [k, _] : defaults.items()) keys.insert(k);
        return keys;
    }();
    for (const auto& [k, _] : j.items()) {
        if (!kKnown.count(k)) throw ConfigError("unknown_config_key", "unknown config key '" + k + "'");
    }

    PipelineConfig c;
    auto get = [&](const char* key, auto& field) {
        if (!j.contains(key)) return;
        using Field = std::decay_t<decltype(field)>;
        if constexpr (std::is_unsigned_v<Field>) {
            if (!j.at(key).is_number_unsigned()) {
                throw ConfigError("invalid_config_value",
                                  std::string("'") + key + "' must be a non-negative integer");
            }
        }
        try {
            j.at(key).get_to(field);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("invalid_config_value", std::string("bad value for '") + key + "'");
        }
    };
    get("tau", c.tau);
    get("alpha", c.alpha);
    get("penalty_f", c.penalty_f);
    get("dim", c.dim);
    get("epsilon", c.epsilon);
    get("cap_dynamic", c.cap_dynamic);
    get("cap_static", c.cap_static);
    if (j.contains("relevance_floor") && !j["relevance_floor"].is_null()) {
        double floor = 0.0;
        get("relevance_floor", floor);
        c.relevance_floor = floor;
    }
    get("max_depth", c.max_depth);
    get("query_budget", c.query_budget);
    get("disease_lexicon", c.disease_lexicon);
    get("synonym_table", c.synonym_table);
    get("extractor", c.extractor);
    get("embedding", c.embedding);
    get("llm_endpoint", c.llm_endpoint);
    get("llm_max_attempts", c.llm_max_attempts);
    get("llm_timeout_ms", c.llm_timeout_ms);
    get("ncbi_base_url", c.ncbi_base_url);
    get("ncbi_retmax", c.ncbi_retmax);
    get("ncbi_requests_per_second", c.ncbi_requests_per_second);
    c.validate();
    return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file_not_found", "cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config_parse_error", e.what());
    }
    PipelineConfig c = config_from_json(j);
    // relative file references are taken from the config's own directory
    const auto base = path.parent_path();
    for (std::string* p : {&c.disease_lexicon, &c.synonym_table}) {
        if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
    }
    return c;
}

// One canonical disease name per line; blank lines and '#' comments ignored.
inline std::set<std::string> load_disease_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file_not_found", "cannot open lexicon '" + path.string() + "'");
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string n = normalize_text(line);
        if (!n.empty()) out.insert(std::move(n));
    }
    return out;
}

// JSON object {"surface form": "canonical form", ...}.
inline SynonymTable load_synonym_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file_not_found", "cannot open synonyms '" + path.string() + "'");
    try {
        auto j = nlohmann::json::parse(in);
        return make_synonym_table(j.get<std::map<std::string, std::string>>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("synonym_parse_error", e.what());
    }
}

}  // namespace memforge
