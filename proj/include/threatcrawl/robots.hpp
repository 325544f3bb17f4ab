#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

using SteadyClock = std::chrono::steady_clock;

struct RobotsRule {
    bool allow = false;
    std::string pattern;  // may contain '*' and a trailing '$'
};

// Access rules and crawl delay for one authority, already narrowed to the
// group that applies to our user-agent token.
struct RobotsRecord {
    std::string domain;
    std::vector<RobotsRule> rules;
    double crawl_delay_s = 5.0;
    bool declared_delay = false;
    bool deny_all = false;
    SteadyClock::time_point fetched_at{};
    double ttl_s = 24 * 3600.0;
    int invalid_lines = 0;

    // RFC 9309 evaluation: longest matching pattern wins, allow wins ties,
    // no match means allowed. /robots.txt itself is always allowed.
    bool allowed(std::string_view path_and_query) const;

    bool expired(SteadyClock::time_point now) const {
        return now - fetched_at >= std::chrono::duration<double>(ttl_s);
    }
};

RobotsRecord allow_all_robots(std::string domain, double default_delay_s);
RobotsRecord deny_all_robots(std::string domain, double default_delay_s);

// Parses a robots.txt body for `agent_token` (the product token, e.g.
// "ThreatCrawl-clone"). Groups naming the token are merged; otherwise the
// "*" groups apply. A missing or invalid Crawl-delay leaves the default.
RobotsRecord parse_robots(std::string_view body, std::string_view agent_token,
                          std::string domain, double default_delay_s);

// Pattern match for a single rule; exposed for tests.
bool robots_pattern_matches(std::string_view pattern, std::string_view path);

}  // namespace threatcrawl
