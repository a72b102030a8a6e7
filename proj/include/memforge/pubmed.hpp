#pragma once
// NCBI E-utilities client: esearch for PubMed ids, efetch (rettype=abstract,
// XML) for titles and abstracts. Requests are spaced by a fixed rate limit.

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "memforge/corpus.hpp"
#include "memforge/error.hpp"
#include "memforge/pipeline.hpp"
#include "memforge/remote_extractor.hpp"

namespace memforge {

struct PubMedOptions {
    std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
    std::string api_key;
    int retmax = 20;
    double requests_per_second = 3.0;
    std::chrono::milliseconds timeout{30000};

    static std::string api_key_from_env() {
        const char* key = std::getenv("MEMFORGE_NCBI_API_KEY");
        return key ? key : "";
    }
};

// Parses an efetch PubmedArticleSet; articles without abstract text are skipped.
inline std::vector<Document> parse_pubmed_xml(const std::string& xml) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(xml);
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw NetworkError("efetch_parse_error", std::string("efetch returned bad XML: ") + e.what());
    }
    std::vector<Document> docs;
    const auto set = tree.get_child_optional("PubmedArticleSet");
    if (!set) return docs;
    for (const auto& [name, article] : *set) {
        if (name != "PubmedArticle") continue;
        const std::string pmid = article.get<std::string>("MedlineCitation.PMID", "");
        const std::string title = article.get<std::string>("MedlineCitation.Article.ArticleTitle", "");
        std::string abstract;
        if (auto abs = article.get_child_optional("MedlineCitation.Article.Abstract")) {
            for (const auto& [part_name, part] : *abs) {
                if (part_name != "AbstractText") continue;
                if (!abstract.empty()) abstract += " ";
                abstract += part.get_value<std::string>();
            }
        }
        if (pmid.empty() || abstract.empty()) continue;
        docs.push_back(make_document(pmid, title.empty() ? abstract : title + " " + abstract));
    }
    return docs;
}

class PubMedClient final : public LiteratureSource {
public:
    explicit PubMedClient(PubMedOptions options)
        : options_(std::move(options)), target_(split_url(options_.base_url)) {
        if (!(options_.requests_per_second > 0.0)) {
            throw ConfigError("invalid_rate", "requests_per_second must be > 0");
        }
        if (target_.path.empty() || target_.path.back() != '/') target_.path += '/';
    }

    std::vector<std::string> esearch(const SearchQuery& query) {
        httplib::Params params{{"db", "pubmed"},
                               {"term", query.text},
                               {"retmax", std::to_string(options_.retmax)},
                               {"retmode", "json"}};
        if (!options_.api_key.empty()) params.emplace("api_key", options_.api_key);
        const std::string body = get("esearch.fcgi", params);
        try {
            auto j = nlohmann::json::parse(body);
            return j.at("esearchresult").at("idlist").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw NetworkError("esearch_parse_error", std::string("esearch returned bad JSON: ") + e.what());
        }
    }

    std::vector<Document> efetch(const std::vector<std::string>& ids) {
        if (ids.empty()) return {};
        std::string joined;
        for (const auto& id : ids) {
            if (!joined.empty()) joined += ',';
            joined += id;
        }
        httplib::Params params{{"db", "pubmed"}, {"id", joined}, {"rettype", "abstract"}, {"retmode", "xml"}};
        if (!options_.api_key.empty()) params.emplace("api_key", options_.api_key);
        return parse_pubmed_xml(get("efetch.fcgi", params));
    }

    std::vector<Document> search(const SearchQuery& query) override { return efetch(esearch(query)); }

private:
    std::string get(const std::string& endpoint, const httplib::Params& params) {
        throttle();
        httplib::Client client(target_.origin);
        const auto secs = options_.timeout.count() / 1000;
        const auto usecs = (options_.timeout.count() % 1000) * 1000;
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        auto res = client.Get(target_.path + endpoint, params, httplib::Headers{});
        if (!res) {
            throw NetworkError("transport_error", endpoint + ": " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw NetworkError("http_error", endpoint + ": HTTP " + std::to_string(res->status));
        }
        return res->body;
    }

    void throttle() {
        using clock = std::chrono::steady_clock;
        const auto interval = std::chrono::duration_cast<clock::duration>(
            std::chrono::duration<double>(1.0 / options_.requests_per_second));
        const auto now = clock::now();
        if (last_request_ && now < *last_request_ + interval) {
            std::this_thread::sleep_until(*last_request_ + interval);
        }
        last_request_ = clock::now();
    }

    PubMedOptions options_;
    HttpTarget target_;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
};

}  // namespace memforge
