#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace threatcrawl {

// RFC 3986 reference split into its five components. Components that were
// absent in the input stay nullopt so resolution can tell "" from missing.
struct UrlParts {
    std::optional<std::string> scheme;
    std::optional<std::string> authority;
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;
};

UrlParts split_reference(std::string_view ref);
std::string recompose(const UrlParts& parts);

// Removes "." and ".." segments (RFC 3986 5.2.4).
std::string remove_dot_segments(std::string_view path);

// Resolves `ref` against an absolute `base` (RFC 3986 5.2.2). Returns nullopt
// when the base has no scheme.
std::optional<std::string> resolve_reference(std::string_view base, std::string_view ref);

// Canonical form used as the crawler's identity for a page: lowercase scheme
// and host, no fragment, no default port, dot-segments resolved, empty path
// becomes "/", query preserved verbatim. Only http and https are accepted.
std::optional<std::string> normalize_url(std::string_view url);

// Resolve then normalize. This is what link extraction uses.
std::optional<std::string> resolve_and_normalize(std::string_view base, std::string_view href);

// Parsed view of an already-normalized URL.
struct HttpUrl {
    std::string scheme;
    std::string host;
    std::optional<int> port;  // only set when non-default
    std::string path_and_query;

    // "host" or "host:port"; the unit robots.txt and crawl delays apply to.
    std::string authority() const;
    std::string origin() const { return scheme + "://" + authority(); }
};

std::optional<HttpUrl> parse_http_url(std::string_view normalized);

// Convenience: authority of a URL, empty if it does not parse.
std::string authority_of(std::string_view url);

}  // namespace threatcrawl
