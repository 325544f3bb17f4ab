#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/blacklist.hpp"
#include "threatcrawl/classifier.hpp"
#include "threatcrawl/document_store.hpp"
#include "threatcrawl/frontier.hpp"
#include "threatcrawl/html.hpp"

namespace threatcrawl {

inline constexpr std::string_view kAgentToken = "ThreatCrawl-clone";

struct ExtractedPage {
    std::string url;
    std::string main_text;
    std::vector<std::string> sentences;
    std::vector<AnchorLink> candidate_links;
    bool meta_nofollow = false;
    std::optional<std::string> base_href;
};

ExtractedPage parse_page(std::string_view html, std::string url, const MainContentOptions& content = {},
                         std::size_t min_sentence_tokens = 3);

struct LinkFilterStats {
    std::size_t malformed = 0;
    std::size_t excluded_scheme = 0;
    std::size_t nofollow = 0;
    std::size_t blacklisted = 0;
    std::size_t duplicate = 0;
    std::size_t self = 0;
};

struct LinkExtraction {
    std::vector<UrlTask> tasks;
    // Every accepted reference in document order, repeats included.
    std::vector<std::string> references;
    LinkFilterStats stats;
};

// Anchor hrefs -> absolute, normalized, filtered, page-deduplicated tasks
// at depth parent_depth + 1. A page-level robots nofollow yields nothing.
LinkExtraction extract_links(const ExtractedPage& page, std::string_view base, const Blacklist& blacklist,
                             int parent_depth = 0);

struct ExtractorOptions {
    MainContentOptions content;
    std::size_t min_sentence_tokens = 3;
    // Baseline mode: follow links of every document, not only relevant ones.
    bool follow_all_links = false;
    // When set, each page's links are shuffled before enqueueing.
    std::optional<std::uint64_t> shuffle_seed;
    // Replaces Frontier::enqueue when set.
    std::function<bool(UrlTask)> enqueue;
};

struct ProcessedOutcome {
    std::string url;
    bool relevant = false;
    std::optional<Label> label;
    std::optional<double> rank_key;
    std::size_t enqueue_attempts = 0;
    std::size_t enqueued = 0;
    std::vector<std::string> links;
    LinkFilterStats link_stats;
    bool errored = false;
    bool backend_failure = false;
    std::string error;
    StoredDocument document;
};

// Turns fetched documents into processed ones. Links are only followed from
// documents the classifier marks relevant (unless follow_all_links).
class Extractor {
public:
    Extractor(const GroundTruthMap& truths, const EmbeddingBackend& backend, const Blacklist& blacklist,
              ExtractorOptions options = {});

    // frontier and store may be null (dry run). Links resolve against
    // base_url when given (the post-redirect URL), else doc.url.
    ProcessedOutcome process(StoredDocument doc, int depth, Frontier* frontier, DocumentStore* store,
                             std::string_view base_url = {});

    ClassificationResult classify_sentences(const std::vector<std::string>& sentences);

private:
    const GroundTruthMap& truths_;
    const EmbeddingBackend& backend_;
    const Blacklist& blacklist_;
    ExtractorOptions options_;
    std::mutex backend_mu_;
};

}  // namespace threatcrawl
