#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/frontier.hpp"
#include "threatcrawl/http_client.hpp"
#include "threatcrawl/robots.hpp"

namespace threatcrawl {

struct RetrieverOptions {
    std::string version = "0.1.0";
    std::string info_url = "https://example.org/threatcrawl-clone";
    double timeout_s = 30.0;
    std::size_t max_page_bytes = 5 * 1024 * 1024;
    int retries = 2;
    double backoff_s = 1.0;
    int max_redirects = 5;
    double default_delay_s = 5.0;
    double robots_ttl_s = 24 * 3600.0;

    std::string user_agent() const;
};

enum class SkipReason {
    RobotsDisallowed,
    RobotsUnavailable,
    NonHtml,
    Oversize,
    Timeout,
    Tls,
    Network,
    HttpStatus,
    TooManyRedirects,
    RedirectOffsite,
    RedirectSeen,
    Cancelled,
};

std::string_view skip_reason_name(SkipReason r);

struct SkipRecord {
    std::string url;
    SkipReason reason = SkipReason::Network;
    int status = 0;
    std::string detail;
};

struct FetchResult {
    std::string url;        // the task URL
    std::string final_url;  // after same-authority redirects
    int status = 0;
    std::string content_type;
    std::string body;
    double elapsed_ms = 0.0;
    std::vector<std::string> redirects;
};

struct FetchOutcome {
    std::optional<FetchResult> result;
    std::optional<SkipRecord> skip;
    // Cross-authority redirect target, to be enqueued by the caller.
    std::optional<std::string> offsite_target;
    int requests = 0;
};

class RobotsUnavailable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_html_content_type(std::string_view content_type);

// Sleeps in small steps; returns false if cancelled first.
bool interruptible_sleep(double seconds, const std::atomic<bool>* cancel);

// Fetches pages for one already-claimed authority: robots.txt, redirects,
// retries, content-type and size checks. No state beyond the options.
class Retriever {
public:
    Retriever(RetrieverOptions options, HttpClient& client);

    // 2xx -> parsed, 4xx -> allow all, 5xx -> deny all. Throws
    // RobotsUnavailable when the host cannot be reached after retries.
    RobotsRecord fetch_robots(const std::string& origin, const std::atomic<bool>* cancel = nullptr);

    // `claim_redirect` is asked before following a same-authority redirect;
    // it returns false when the target was already seen.
    FetchOutcome fetch(const UrlTask& task, const RobotsRecord& robots,
                       const std::function<bool(const std::string&)>& claim_redirect,
                       const std::atomic<bool>* cancel = nullptr);

    const RetrieverOptions& options() const { return options_; }

private:
    HttpResult request_with_retries(const std::string& url, double delay_s, const std::atomic<bool>* cancel,
                                    int& requests, std::size_t max_bytes);

    RetrieverOptions options_;
    HttpClient& client_;
};

}  // namespace threatcrawl
