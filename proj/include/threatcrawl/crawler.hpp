#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "threatcrawl/blacklist.hpp"
#include "threatcrawl/classifier.hpp"
#include "threatcrawl/config.hpp"
#include "threatcrawl/crawl_graph.hpp"
#include "threatcrawl/document_store.hpp"
#include "threatcrawl/frontier.hpp"
#include "threatcrawl/http_client.hpp"
#include "threatcrawl/monitor.hpp"
#include "threatcrawl/retriever.hpp"

namespace threatcrawl {

struct RankedDocument {
    std::string url;
    std::string label;
    double rank_key = 0.0;
};

struct CrawlReport {
    std::size_t processed = 0;
    std::size_t relevant = 0;
    std::size_t fetched = 0;
    std::size_t skipped = 0;
    std::size_t errored = 0;
    std::size_t requests = 0;
    std::optional<double> harvest_rate;
    double runtime_s = 0.0;
    std::size_t frontier_remaining = 0;
    bool stopped = false;
    std::string stop_reason;
    std::map<std::string, std::size_t> skip_counts;
    std::vector<RankedDocument> ranked;
    GraphExportSummary graph;
};

// Relevant documents by ascending rank key, ties by URL.
std::vector<RankedDocument> rank_documents(std::span<const IndexRow> rows);

std::string ranked_csv(const std::vector<RankedDocument>& ranked);
std::string report_summary(const CrawlReport& report);

// One URL per line; blank lines and '#' comments ignored.
std::vector<std::string> load_seeds(const std::filesystem::path& path);

// Output directory layout:
//   index.jsonl, blobs/      document store
//   frontier.jsonl           queue and visited-set log (resume)
//   skipped.jsonl            one record per skipped URL
//   ranked.csv, graph.dot, graph.graphml, report.json
class Crawler {
public:
    Crawler(CrawlConfig config, GroundTruthMap truths, const EmbeddingBackend& backend, Blacklist blacklist,
            HttpClient& client);
    ~Crawler();

    CrawlReport run(const std::vector<std::string>& seeds);

    // Idempotent; safe from any thread.
    void emergency_stop(const std::string& reason = "stop requested");

    Monitor& monitor() { return monitor_; }
    Frontier& frontier() { return *frontier_; }
    DocumentStore& store() { return *store_; }

private:
    struct Impl;
    void retriever_loop(int worker_id);
    void extractor_loop(int worker_id);

    CrawlConfig config_;
    GroundTruthMap truths_;
    const EmbeddingBackend& backend_;
    Blacklist blacklist_;
    HttpClient& client_;
    Monitor monitor_;
    std::unique_ptr<Frontier> frontier_;
    std::unique_ptr<DocumentStore> store_;
    std::unique_ptr<Impl> impl_;
};

// Loads model, seeds, blacklist and backend from the config and runs a crawl.
// Throws ConfigError for bad configuration and BackendError when the
// embedding backend is unreachable.
CrawlReport run_crawl(const CrawlConfig& config);

// Loads a model and checks it against the backend's name and dimension.
Model load_model_for(const std::filesystem::path& path, const EmbeddingBackend& backend);

}  // namespace threatcrawl
