#include "threatcrawl/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <unordered_set>

#include "threatcrawl/log.hpp"
#include "threatcrawl/sentences.hpp"
#include "threatcrawl/url.hpp"

namespace threatcrawl {

namespace {

bool has_excluded_scheme(std::string_view href) {
    std::string prefix;
    for (char c : href) {
        if (c == ':') break;
        if (std::isspace(static_cast<unsigned char>(c)) && prefix.empty()) continue;
        prefix += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (prefix.size() > 12) return false;
    }
    return prefix == "mailto" || prefix == "javascript" || prefix == "tel" || prefix == "data";
}

bool rel_nofollow(std::string_view rel) {
    std::size_t pos = 0;
    while (pos < rel.size()) {
        auto start = rel.find_first_not_of(" \t\n", pos);
        if (start == std::string_view::npos) break;
        auto end = rel.find_first_of(" \t\n", start);
        if (rel.substr(start, end == std::string_view::npos ? rel.npos : end - start) == "nofollow") return true;
        pos = end == std::string_view::npos ? rel.size() : end;
    }
    return false;
}

std::uint64_t url_hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

ExtractedPage parse_page(std::string_view html, std::string url, const MainContentOptions& content,
                         std::size_t min_sentence_tokens) {
    HtmlDocument doc = HtmlDocument::parse(html);
    ExtractedPage page;
    page.url = std::move(url);
    page.main_text = extract_main_content(doc, content);
    page.sentences = split_sentences(page.main_text, min_sentence_tokens);
    page.candidate_links = collect_anchors(doc);
    page.meta_nofollow = meta_nofollow(doc, kAgentToken);
    page.base_href = base_href(doc);
    return page;
}

LinkExtraction extract_links(const ExtractedPage& page, std::string_view base, const Blacklist& blacklist,
                             int parent_depth) {
    LinkExtraction out;
    if (page.meta_nofollow) {
        out.stats.nofollow = page.candidate_links.size();
        return out;
    }

    std::string effective_base(base);
    if (page.base_href) {
        if (auto b = resolve_reference(base, *page.base_href)) effective_base = *b;
    }
    auto self = normalize_url(base);

    std::unordered_set<std::string> seen;
    for (const auto& link : page.candidate_links) {
        if (has_excluded_scheme(link.href)) {
            ++out.stats.excluded_scheme;
            continue;
        }
        if (rel_nofollow(link.rel)) {
            ++out.stats.nofollow;
            continue;
        }
        auto resolved = resolve_reference(effective_base, link.href);
        if (!resolved) {
            ++out.stats.malformed;
            continue;
        }
        auto scheme = split_reference(*resolved).scheme.value_or("");
        for (auto& c : scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (scheme != "http" && scheme != "https") {
            ++out.stats.excluded_scheme;
            continue;
        }
        auto normalized = normalize_url(*resolved);
        if (!normalized) {
            ++out.stats.malformed;
            continue;
        }
        if (self && *normalized == *self) {
            ++out.stats.self;
            continue;
        }
        if (blacklist.blocks_url(*normalized)) {
            ++out.stats.blacklisted;
            continue;
        }
        out.references.push_back(*normalized);
        if (!seen.insert(*normalized).second) {
            ++out.stats.duplicate;
            continue;
        }
        UrlTask task;
        task.url = std::move(*normalized);
        task.parent = self ? *self : std::string(base);
        task.depth = parent_depth + 1;
        out.tasks.push_back(std::move(task));
    }
    return out;
}

Extractor::Extractor(const GroundTruthMap& truths, const EmbeddingBackend& backend, const Blacklist& blacklist,
                     ExtractorOptions options)
    : truths_(truths), backend_(backend), blacklist_(blacklist), options_(std::move(options)) {}

ClassificationResult Extractor::classify_sentences(const std::vector<std::string>& sentences) {
    if (backend_.supports_concurrent_calls()) return classify(sentences, truths_, backend_);
    std::lock_guard lock(backend_mu_);
    return classify(sentences, truths_, backend_);
}

ProcessedOutcome Extractor::process(StoredDocument doc, int depth, Frontier* frontier, DocumentStore* store,
                                    std::string_view base_url) {
    ProcessedOutcome outcome;
    outcome.url = doc.url;

    ExtractedPage page = parse_page(doc.raw_body, doc.url, options_.content, options_.min_sentence_tokens);

    ClassificationResult cls;
    try {
        cls = classify_sentences(page.sentences);
    } catch (const BackendError& e) {
        outcome.errored = true;
        outcome.backend_failure = true;
        outcome.error = e.what();
        log_error("embedding backend failed for " + doc.url + ": " + e.what());
        outcome.document = std::move(doc);
        return outcome;
    } catch (const std::exception& e) {
        outcome.errored = true;
        outcome.error = e.what();
        log_warn("classification failed for " + doc.url + ": " + e.what());
        outcome.document = std::move(doc);
        return outcome;
    }

    outcome.relevant = cls.relevant;
    outcome.label = cls.assigned;
    if (cls.relevant) outcome.rank_key = relevance_rank_key(cls);

    std::vector<UrlTask> tasks;
    if (cls.relevant || options_.follow_all_links) {
        auto links = extract_links(page, base_url.empty() ? std::string_view(doc.url) : base_url, blacklist_, depth);
        outcome.link_stats = links.stats;
        tasks = std::move(links.tasks);
        for (auto& t : tasks) t.parent = doc.url;
        outcome.links = std::move(links.references);
        if (options_.shuffle_seed) {
            std::mt19937_64 rng(*options_.shuffle_seed ^ url_hash(doc.url));
            std::shuffle(tasks.begin(), tasks.end(), rng);
        }
    }

    doc.extracted_text = page.main_text;
    doc.extracted_links = outcome.links;
    doc.classification = std::move(cls);
    doc.processed = true;
    // Stored before enqueueing, so every queued child has a stored parent.
    if (store) store->store_processed(doc);

    for (auto& task : tasks) {
        ++outcome.enqueue_attempts;
        bool accepted = options_.enqueue ? options_.enqueue(std::move(task))
                                         : frontier && frontier->enqueue(std::move(task));
        if (accepted) ++outcome.enqueued;
    }
    outcome.document = std::move(doc);
    return outcome;
}

}  // namespace threatcrawl
