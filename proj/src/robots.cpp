#include "threatcrawl/robots.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace threatcrawl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

// The product token of a user-agent line: leading [A-Za-z_-] characters.
std::string_view agent_product(std::string_view value) {
    std::size_t n = 0;
    while (n < value.size() &&
           (std::isalpha(static_cast<unsigned char>(value[n])) || value[n] == '-' || value[n] == '_')) {
        ++n;
    }
    if (n == 0 && !value.empty() && value.front() == '*') return value.substr(0, 1);
    return value.substr(0, n);
}

enum class Key { UserAgent, Allow, Disallow, CrawlDelay, Other, Invalid };

Key classify_key(std::string_view key) {
    if (iequals(key, "user-agent") || iequals(key, "useragent") || iequals(key, "user agent")) {
        return Key::UserAgent;
    }
    if (iequals(key, "allow")) return Key::Allow;
    if (iequals(key, "disallow") || iequals(key, "dissallow") || iequals(key, "disalow")) {
        return Key::Disallow;
    }
    if (iequals(key, "crawl-delay")) return Key::CrawlDelay;
    if (key.empty()) return Key::Invalid;
    return Key::Other;
}

struct Group {
    std::vector<std::string> agents;
    std::vector<RobotsRule> rules;
    double delay = -1.0;
};

// Uppercases the hex digits of %XX escapes so "%3c" and "%3C" compare equal.
std::string canonical_escapes(std::string_view s) {
    std::string out(s);
    for (std::size_t i = 0; i + 2 < out.size(); ++i) {
        if (out[i] != '%' || !std::isxdigit(static_cast<unsigned char>(out[i + 1])) ||
            !std::isxdigit(static_cast<unsigned char>(out[i + 2]))) {
            continue;
        }
        out[i + 1] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 1])));
        out[i + 2] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 2])));
        i += 2;
    }
    return out;
}

}  // namespace

bool robots_pattern_matches(std::string_view raw_pattern, std::string_view raw_path) {
    const std::string pattern_buf = canonical_escapes(raw_pattern);
    const std::string path_buf = canonical_escapes(raw_path);
    std::string_view pattern = pattern_buf;
    std::string_view path = path_buf;
    bool anchored = !pattern.empty() && pattern.back() == '$';
    if (anchored) pattern.remove_suffix(1);

    std::size_t p = 0, s = 0;
    std::size_t star_p = std::string_view::npos, star_s = 0;
    while (s < path.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star_p = p++;
            star_s = s;
        } else if (p < pattern.size() && pattern[p] == path[s]) {
            ++p;
            ++s;
        } else if (p == pattern.size() && !anchored) {
            return true;
        } else if (star_p != std::string_view::npos) {
            p = star_p + 1;
            s = ++star_s;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool RobotsRecord::allowed(std::string_view path_and_query) const {
    if (path_and_query == "/robots.txt") return true;
    if (deny_all) return false;
    if (path_and_query.empty()) path_and_query = "/";

    std::ptrdiff_t best_len = -1;
    bool best_allow = true;
    for (const auto& rule : rules) {
        if (!robots_pattern_matches(rule.pattern, path_and_query)) continue;
        auto len = static_cast<std::ptrdiff_t>(rule.pattern.size());
        if (len > best_len || (len == best_len && rule.allow)) {
            best_len = len;
            best_allow = rule.allow;
        }
    }
    return best_allow;
}

RobotsRecord allow_all_robots(std::string domain, double default_delay_s) {
    RobotsRecord rec;
    rec.domain = std::move(domain);
    rec.crawl_delay_s = default_delay_s;
    return rec;
}

RobotsRecord deny_all_robots(std::string domain, double default_delay_s) {
    RobotsRecord rec = allow_all_robots(std::move(domain), default_delay_s);
    rec.deny_all = true;
    return rec;
}

RobotsRecord parse_robots(std::string_view body, std::string_view agent_token,
                          std::string domain, double default_delay_s) {
    RobotsRecord rec = allow_all_robots(std::move(domain), default_delay_s);

    std::vector<Group> groups;
    bool in_agent_block = false;

    while (!body.empty()) {
        auto eol = body.find_first_of("\r\n");
        std::string_view line = body.substr(0, eol);
        body = eol == std::string_view::npos ? std::string_view{} : body.substr(eol + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            ++rec.invalid_lines;
            continue;
        }
        auto key = classify_key(trim(line.substr(0, colon)));
        auto value = trim(line.substr(colon + 1));

        switch (key) {
            case Key::UserAgent:
                if (!in_agent_block) groups.emplace_back();
                groups.back().agents.emplace_back(agent_product(value));
                in_agent_block = true;
                break;
            case Key::Allow:
            case Key::Disallow:
                in_agent_block = false;
                if (groups.empty()) {
                    ++rec.invalid_lines;
                    break;
                }
                // An empty Disallow means nothing is disallowed.
                if (value.empty()) break;
                groups.back().rules.push_back({key == Key::Allow, std::string(value)});
                break;
            case Key::CrawlDelay: {
                in_agent_block = false;
                if (groups.empty()) break;
                std::string text(value);
                char* end = nullptr;
                double delay = std::strtod(text.c_str(), &end);
                if (end != text.c_str() && delay > 0.0) groups.back().delay = delay;
                break;
            }
            case Key::Other:
                // Sitemap and unknown extensions do not end an agent block.
                break;
            case Key::Invalid:
                ++rec.invalid_lines;
                break;
        }
    }

    auto matches_token = [&](const Group& g) {
        return std::any_of(g.agents.begin(), g.agents.end(),
                           [&](const std::string& a) { return iequals(a, agent_token); });
    };
    auto matches_star = [](const Group& g) {
        return std::find(g.agents.begin(), g.agents.end(), "*") != g.agents.end();
    };

    bool specific = std::any_of(groups.begin(), groups.end(), matches_token);
    for (const auto& g : groups) {
        if (specific ? !matches_token(g) : !matches_star(g)) continue;
        rec.rules.insert(rec.rules.end(), g.rules.begin(), g.rules.end());
        if (g.delay > 0.0 && !rec.declared_delay) {
            rec.crawl_delay_s = g.delay;
            rec.declared_delay = true;
        }
    }
    return rec;
}

}  // namespace threatcrawl
