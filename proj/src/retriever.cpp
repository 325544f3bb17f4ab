#include "threatcrawl/retriever.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <thread>

#include "threatcrawl/extractor.hpp"
#include "threatcrawl/log.hpp"
#include "threatcrawl/url.hpp"

namespace threatcrawl {

namespace {

bool retriable(const HttpResult& r) {
    if (r.error == TransportError::Timeout || r.error == TransportError::Network) return true;
    return r.ok() && r.response.status >= 500;
}

SkipReason skip_for(TransportError e) {
    switch (e) {
        case TransportError::Timeout: return SkipReason::Timeout;
        case TransportError::Tls: return SkipReason::Tls;
        case TransportError::Oversize: return SkipReason::Oversize;
        case TransportError::Cancelled: return SkipReason::Cancelled;
        default: return SkipReason::Network;
    }
}

}  // namespace

std::string RetrieverOptions::user_agent() const {
    return std::string(kAgentToken) + "/" + version + " (+" + info_url + ")";
}

std::string_view skip_reason_name(SkipReason r) {
    switch (r) {
        case SkipReason::RobotsDisallowed: return "robots-disallowed";
        case SkipReason::RobotsUnavailable: return "robots-unavailable";
        case SkipReason::NonHtml: return "non-html";
        case SkipReason::Oversize: return "oversize";
        case SkipReason::Timeout: return "timeout";
        case SkipReason::Tls: return "tls";
        case SkipReason::Network: return "network";
        case SkipReason::HttpStatus: return "http-status";
        case SkipReason::TooManyRedirects: return "too-many-redirects";
        case SkipReason::RedirectOffsite: return "redirect-offsite";
        case SkipReason::RedirectSeen: return "redirect-seen";
        case SkipReason::Cancelled: return "cancelled";
    }
    return "?";
}

bool is_html_content_type(std::string_view content_type) {
    auto semi = content_type.find(';');
    std::string media(content_type.substr(0, semi));
    media.erase(std::remove_if(media.begin(), media.end(), [](unsigned char c) { return std::isspace(c); }),
                media.end());
    std::transform(media.begin(), media.end(), media.begin(), [](unsigned char c) { return std::tolower(c); });
    return media == "text/html" || media == "application/xhtml+xml";
}

bool interruptible_sleep(double seconds, const std::atomic<bool>* cancel) {
    using namespace std::chrono;
    auto until = steady_clock::now() + duration_cast<steady_clock::duration>(duration<double>(seconds));
    while (true) {
        if (cancel && cancel->load()) return false;
        auto now = steady_clock::now();
        if (now >= until) return true;
        std::this_thread::sleep_for(std::min<steady_clock::duration>(until - now, milliseconds(20)));
    }
}

Retriever::Retriever(RetrieverOptions options, HttpClient& client) : options_(std::move(options)), client_(client) {}

HttpResult Retriever::request_with_retries(const std::string& url, double delay_s, const std::atomic<bool>* cancel,
                                           int& requests, std::size_t max_bytes) {
    HttpRequest req;
    req.url = url;
    req.timeout_s = options_.timeout_s;
    req.max_body_bytes = max_bytes;
    req.headers = {{"User-Agent", options_.user_agent()}, {"Accept", "text/html,application/xhtml+xml;q=0.9,*/*;q=0.1"}};

    HttpResult result;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            double backoff = std::max(options_.backoff_s * std::pow(2.0, attempt - 1), delay_s);
            log_info("retrying " + url + " in " + std::to_string(backoff) + "s");
            if (!interruptible_sleep(backoff, cancel)) {
                result = {};
                result.error = TransportError::Cancelled;
                return result;
            }
        }
        ++requests;
        result = client_.perform(req, cancel);
        if (!retriable(result)) break;
    }
    return result;
}

RobotsRecord Retriever::fetch_robots(const std::string& origin, const std::atomic<bool>* cancel) {
    auto parsed = parse_http_url(origin + "/robots.txt");
    if (!parsed) throw RobotsUnavailable("bad origin " + origin);
    std::string authority = parsed->authority();

    int requests = 0;
    auto result = request_with_retries(origin + "/robots.txt", 0.0, cancel, requests, 512 * 1024);
    RobotsRecord record;
    if (!result.ok() && result.error != TransportError::Oversize) {
        throw RobotsUnavailable(authority + ": " + result.message);
    }
    int status = result.response.status;
    if (result.error == TransportError::Oversize) {
        log_warn("robots.txt too large for " + authority + "; treating as allow-all");
        record = allow_all_robots(authority, options_.default_delay_s);
    } else if (status >= 200 && status < 300) {
        record = parse_robots(result.response.body, kAgentToken, authority, options_.default_delay_s);
        if (record.invalid_lines > 0) {
            log_warn("robots.txt for " + authority + " has " + std::to_string(record.invalid_lines) +
                     " unparseable lines");
        }
    } else if (status >= 500) {
        record = deny_all_robots(authority, options_.default_delay_s);
    } else {
        // 3xx is not followed for robots.txt; 4xx means no restrictions.
        record = allow_all_robots(authority, options_.default_delay_s);
    }
    record.fetched_at = SteadyClock::now();
    record.ttl_s = options_.robots_ttl_s;
    return record;
}

FetchOutcome Retriever::fetch(const UrlTask& task, const RobotsRecord& robots,
                              const std::function<bool(const std::string&)>& claim_redirect,
                              const std::atomic<bool>* cancel) {
    FetchOutcome out;
    auto skip = [&](SkipReason reason, int status, std::string detail) {
        out.skip = SkipRecord{task.url, reason, status, std::move(detail)};
        return out;
    };

    auto current = parse_http_url(task.url);
    if (!current) return skip(SkipReason::Network, 0, "unparseable url");
    const std::string authority = current->authority();
    std::string url = task.url;
    std::vector<std::string> chain;

    for (int hop = 0;; ++hop) {
        if (!robots.allowed(current->path_and_query)) return skip(SkipReason::RobotsDisallowed, 0, url);

        auto result = request_with_retries(url, robots.crawl_delay_s, cancel, out.requests, options_.max_page_bytes);
        if (!result.ok()) return skip(skip_for(result.error), result.response.status, result.message);

        const auto& resp = result.response;
        if (resp.status >= 300 && resp.status < 400 && !resp.location.empty()) {
            if (hop >= options_.max_redirects) return skip(SkipReason::TooManyRedirects, resp.status, url);
            auto target = resolve_and_normalize(url, resp.location);
            auto target_parts = target ? parse_http_url(*target) : std::nullopt;
            if (!target_parts) return skip(SkipReason::Network, resp.status, "bad redirect " + resp.location);
            if (target_parts->authority() != authority) {
                out.offsite_target = *target;
                return skip(SkipReason::RedirectOffsite, resp.status, *target);
            }
            if (claim_redirect && !claim_redirect(*target)) {
                return skip(SkipReason::RedirectSeen, resp.status, *target);
            }
            chain.push_back(*target);
            if (!interruptible_sleep(robots.crawl_delay_s, cancel)) return skip(SkipReason::Cancelled, 0, url);
            url = *target;
            current = target_parts;
            continue;
        }
        if (resp.status < 200 || resp.status >= 300) return skip(SkipReason::HttpStatus, resp.status, url);
        if (!is_html_content_type(resp.content_type)) return skip(SkipReason::NonHtml, resp.status, resp.content_type);

        FetchResult fr;
        fr.url = task.url;
        fr.final_url = url;
        fr.status = resp.status;
        fr.content_type = resp.content_type;
        fr.body = std::move(result.response.body);
        fr.elapsed_ms = resp.elapsed_ms;
        fr.redirects = std::move(chain);
        out.result = std::move(fr);
        return out;
    }
}

}  // namespace threatcrawl
