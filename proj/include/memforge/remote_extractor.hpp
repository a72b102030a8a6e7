#pragma once
// LLM-backed extractor speaking a small JSON protocol.
//
// Request:  {"text": str, "relations": [str], "prompt": str, "prompt_version": str}
// Response: {"triples": [{"s": str, "r": str, "o": str, "c": number}]}
//
// Transport failures and unparseable responses are retried up to
// max_attempts; after that the document is reported as extraction-failed.
// Individual items that are malformed, out of range or outside the schema are
// dropped and counted. Embeddings are always recomputed locally.

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "memforge/embedding.hpp"
#include "memforge/error.hpp"
#include "memforge/extraction.hpp"
#include "memforge/prompt_asset.hpp"

namespace memforge {

struct HttpTarget {
    std::string origin;  // scheme://host[:port]
    std::string path;    // begins with '/'
};

inline HttpTarget split_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) {
        throw ConfigError("invalid_url", "URL '" + std::string(url) + "' has no scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    HttpTarget t;
    t.origin = std::string(url.substr(0, path_start));
    t.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
    if (t.origin.size() <= scheme_end + 3) {
        throw ConfigError("invalid_url", "URL '" + std::string(url) + "' has no host");
    }
    return t;
}

inline std::string render_prompt(std::string_view text, const RelationSchema& schema) {
    std::string relations;
    for (const std::string& r : schema.relations()) {
        if (!relations.empty()) relations += ", ";
        relations += r;
    }
    std::string out(kExtractionPromptTemplate);
    auto replace = [&out](std::string_view key, std::string_view value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
            out.replace(pos, key.size(), value);
        }
    };
    replace("{{relations}}", relations);
    replace("{{text}}", text);
    return out;
}

struct LlmEndpoint {
    std::string url;
    std::string api_key;  // sent as a bearer token when non-empty
    int max_attempts = 3;
    std::chrono::milliseconds timeout{30000};

    static std::string api_key_from_env() {
        const char* key = std::getenv("MEMFORGE_LLM_API_KEY");
        return key ? key : "";
    }
};

// Parses a response body; nullopt when the envelope itself is unusable.
inline std::optional<ExtractionOutcome> parse_extraction_response(std::string_view body,
                                                                  const Document& doc,
                                                                  const RelationSchema& schema,
                                                                  const EmbeddingProvider& embedder) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("triples") || !j["triples"].is_array()) {
        return std::nullopt;
    }
    ExtractionOutcome out;
    for (const auto& item : j["triples"]) {
        const bool well_formed = item.is_object() && item.contains("s") && item["s"].is_string() &&
                                 item.contains("r") && item["r"].is_string() && item.contains("o") &&
                                 item["o"].is_string() && item.contains("c") && item["c"].is_number();
        if (!well_formed) {
            ++out.dropped;
            continue;
        }
        EvidenceTriple t;
        t.subject = item["s"].get<std::string>();
        t.relation = item["r"].get<std::string>();
        t.object = item["o"].get<std::string>();
        t.confidence = item["c"].get<double>();
        if (!(t.confidence >= 0.0 && t.confidence <= 1.0) || !schema.contains(t.relation) ||
            normalize_text(t.subject).empty() || normalize_text(t.object).empty()) {
            ++out.dropped;
            continue;
        }
        t.embedding = embedder.embed(render_triple(t.subject, t.relation, t.object));
        t.source_digest = doc.digest;
        out.triples.push_back(std::move(t));
    }
    return out;
}

class RemoteExtractor final : public ExtractorProvider {
public:
    RemoteExtractor(LlmEndpoint endpoint, const EmbeddingProvider& embedder)
        : endpoint_(std::move(endpoint)), target_(split_url(endpoint_.url)), embedder_(&embedder) {
        if (endpoint_.max_attempts < 1) {
            throw ConfigError("invalid_attempts", "max_attempts must be >= 1");
        }
    }

    ExtractionOutcome extract(const Document& doc, const RelationSchema& schema) const override {
        const nlohmann::json request{{"text", doc.raw_text},
                                     {"relations", schema.relations()},
                                     {"prompt", render_prompt(doc.raw_text, schema)},
                                     {"prompt_version", std::string(kExtractionPromptVersion)}};
        const std::string body = request.dump();

        httplib::Client client(target_.origin);
        const auto secs = endpoint_.timeout.count() / 1000;
        const auto usecs = (endpoint_.timeout.count() % 1000) * 1000;
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        httplib::Headers headers;
        if (!endpoint_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
        }

        ExtractionOutcome failure;
        failure.status = ExtractionStatus::Failed;
        for (int attempt = 1; attempt <= endpoint_.max_attempts; ++attempt) {
            failure.attempts = static_cast<std::size_t>(attempt);
            auto res = client.Post(target_.path, headers, body, "application/json");
            if (!res) {
                failure.error = "transport: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                failure.error = "http status " + std::to_string(res->status);
                continue;
            }
            if (auto parsed = parse_extraction_response(res->body, doc, schema, *embedder_)) {
                parsed->attempts = static_cast<std::size_t>(attempt);
                return std::move(*parsed);
            }
            failure.error = "unparseable response";
        }
        return failure;
    }

private:
    LlmEndpoint endpoint_;
    HttpTarget target_;
    const EmbeddingProvider* embedder_;
};

}  // namespace memforge
