#pragma once
// Literature ingestion: documents, content digests and the monotonic hash
// memory used for deduplication.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memforge/digest.hpp"
#include "memforge/error.hpp"
#include "memforge/text.hpp"

namespace memforge {

struct Document {
    std::string source_id;
    std::string raw_text;
    std::string normalized_text;
    Digest digest;
};

// Digest of already-normalized text.
inline Digest hash_document(std::string_view normalized_text) { return sha256(normalized_text); }

inline Document make_document(std::string source_id, std::string raw_text) {
    Document doc;
    doc.source_id = std::move(source_id);
    doc.raw_text = std::move(raw_text);
    doc.normalized_text = normalize_text(doc.raw_text);
    doc.digest = hash_document(doc.normalized_text);
    return doc;
}

// Set of every digest observed so far. Only grows.
class HashMemory {
public:
    bool contains(const Digest& d) const { return seen_.count(d) != 0; }
    std::size_t size() const { return seen_.size(); }
    std::uint64_t generation() const { return generation_; }
    const std::set<Digest>& seen() const { return seen_; }

    // Used when restoring persisted state.
    static HashMemory restore(std::set<Digest> seen, std::uint64_t generation) {
        HashMemory m;
        m.seen_ = std::move(seen);
        m.generation_ = generation;
        return m;
    }

    // Returns true when the digest was not yet present.
    bool insert(const Digest& d) { return seen_.insert(d).second; }
    void advance_generation() { ++generation_; }

private:
    std::set<Digest> seen_;
    std::uint64_t generation_ = 0;
};

struct DedupResult {
    std::vector<Document> retained;
    HashMemory memory;
    std::size_t removed = 0;
};

// Keeps documents whose digest is neither in `memory` nor earlier in the same
// batch; input order is preserved. The returned memory absorbs every digest.
inline DedupResult dedup_batch(std::span<const Document> docs, const HashMemory& memory) {
    DedupResult out;
    out.memory = memory;
    for (const Document& doc : docs) {
        if (out.memory.insert(doc.digest)) {
            out.retained.push_back(doc);
        } else {
            ++out.removed;
        }
    }
    out.memory.advance_generation();
    return out;
}

struct SearchQuery {
    std::string text;
    int depth = 0;

    bool operator==(const SearchQuery&) const = default;
};

// One JSON object per line: {"id": str, "title": str (optional), "abstract": str}.
// Blank lines are skipped.
inline std::vector<Document> read_corpus_jsonl(std::istream& in) {
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("corpus_parse_error",
                            "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("abstract") || !obj["abstract"].is_string()) {
            throw DataError("corpus_schema_error",
                            "line " + std::to_string(line_no) +
                                ": expected string fields 'id' and 'abstract'");
        }
        std::string text = obj["abstract"].get<std::string>();
        if (obj.contains("title")) {
            if (!obj["title"].is_string()) {
                throw DataError("corpus_schema_error",
                                "line " + std::to_string(line_no) + ": 'title' must be a string");
            }
            text = obj["title"].get<std::string>() + " " + text;
        }
        docs.push_back(make_document(obj["id"].get<std::string>(), std::move(text)));
    }
    return docs;
}

}  // namespace memforge
