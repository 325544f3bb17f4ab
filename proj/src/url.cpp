#include "threatcrawl/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace threatcrawl {

namespace {

bool is_scheme_char(char c, bool first) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) return true;
    if (first) return false;
    return std::isdigit(uc) || c == '+' || c == '-' || c == '.';
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; };
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

// RFC 3986 5.2.3
std::string merge_paths(const UrlParts& base, std::string_view ref_path) {
    if (base.authority && base.path.empty()) {
        return "/" + std::string(ref_path);
    }
    auto slash = base.path.rfind('/');
    if (slash == std::string::npos) return std::string(ref_path);
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

bool valid_host(std::string_view host) {
    if (host.empty()) return false;
    if (host.front() == '[') {
        if (host.back() != ']' || host.size() < 3) return false;
        return std::all_of(host.begin() + 1, host.end() - 1, [](char c) {
            return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.';
        });
    }
    return std::all_of(host.begin(), host.end(), [](char c) {
        auto uc = static_cast<unsigned char>(c);
        return std::isalnum(uc) || c == '-' || c == '.' || c == '_' || c == '%' || uc >= 0x80;
    });
}

int default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

}  // namespace

UrlParts split_reference(std::string_view ref) {
    UrlParts parts;
    std::string_view rest = ref;

    auto colon = rest.find(':');
    auto first_delim = rest.find_first_of("/?#");
    if (colon != std::string_view::npos && colon > 0 &&
        (first_delim == std::string_view::npos || colon < first_delim)) {
        bool ok = true;
        for (std::size_t i = 0; i < colon; ++i) {
            if (!is_scheme_char(rest[i], i == 0)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            parts.scheme = std::string(rest.substr(0, colon));
            rest.remove_prefix(colon + 1);
        }
    }

    if (auto hash = rest.find('#'); hash != std::string_view::npos) {
        parts.fragment = std::string(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    if (auto q = rest.find('?'); q != std::string_view::npos) {
        parts.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    if (rest.substr(0, 2) == "//") {
        rest.remove_prefix(2);
        auto slash = rest.find('/');
        parts.authority = std::string(rest.substr(0, slash));
        rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
    }
    parts.path = std::string(rest);
    return parts;
}

std::string recompose(const UrlParts& parts) {
    std::string out;
    if (parts.scheme) out += *parts.scheme + ":";
    if (parts.authority) out += "//" + *parts.authority;
    out += parts.path;
    if (parts.query) out += "?" + *parts.query;
    if (parts.fragment) out += "#" + *parts.fragment;
    return out;
}

std::string remove_dot_segments(std::string_view path) {
    std::string input(path);
    std::string output;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input = input.size() == 3 ? std::string("/") : input.replace(0, 4, "/");
            auto last = output.rfind('/');
            output.erase(last == std::string::npos ? 0 : last);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            std::size_t start = input.front() == '/' ? 1 : 0;
            auto next = input.find('/', start);
            output += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return output;
}

std::optional<std::string> resolve_reference(std::string_view base, std::string_view ref) {
    UrlParts b = split_reference(base);
    if (!b.scheme) return std::nullopt;
    UrlParts r = split_reference(ref);
    UrlParts t;

    if (r.scheme) {
        t.scheme = r.scheme;
        t.authority = r.authority;
        t.path = remove_dot_segments(r.path);
        t.query = r.query;
    } else {
        if (r.authority) {
            t.authority = r.authority;
            t.path = remove_dot_segments(r.path);
            t.query = r.query;
        } else {
            if (r.path.empty()) {
                t.path = b.path;
                t.query = r.query ? r.query : b.query;
            } else {
                if (r.path.front() == '/') {
                    t.path = remove_dot_segments(r.path);
                } else {
                    t.path = remove_dot_segments(merge_paths(b, r.path));
                }
                t.query = r.query;
            }
            t.authority = b.authority;
        }
        t.scheme = b.scheme;
    }
    t.fragment = r.fragment;
    return recompose(t);
}

std::optional<std::string> normalize_url(std::string_view url) {
    std::string_view trimmed = trim(url);
    if (trimmed.empty()) return std::nullopt;

    std::string cleaned;
    cleaned.reserve(trimmed.size());
    for (char c : trimmed) {
        auto uc = static_cast<unsigned char>(c);
        if (uc < 0x20 || uc == 0x7f) return std::nullopt;
        if (c == ' ') {
            cleaned += "%20";
        } else {
            cleaned += c;
        }
    }

    UrlParts parts = split_reference(cleaned);
    if (!parts.scheme || !parts.authority) return std::nullopt;
    std::string scheme = to_lower(*parts.scheme);
    if (scheme != "http" && scheme != "https") return std::nullopt;

    std::string_view authority = *parts.authority;
    if (authority.find('@') != std::string_view::npos) return std::nullopt;

    std::string_view host = authority;
    std::string_view port;
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = authority.substr(0, close + 1);
        auto after = authority.substr(close + 1);
        if (!after.empty()) {
            if (after.front() != ':') return std::nullopt;
            port = after.substr(1);
        }
    } else if (auto c = authority.rfind(':'); c != std::string_view::npos) {
        host = authority.substr(0, c);
        port = authority.substr(c + 1);
    }

    std::string lower_host = to_lower(host);
    while (!lower_host.empty() && lower_host.back() == '.') lower_host.pop_back();
    if (!valid_host(lower_host)) return std::nullopt;

    std::string out = scheme + "://" + lower_host;
    if (!port.empty()) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
        if (ec != std::errc{} || ptr != port.data() + port.size() || value <= 0 || value > 65535) {
            return std::nullopt;
        }
        if (value != default_port(scheme)) out += ":" + std::to_string(value);
    }

    std::string path = remove_dot_segments(parts.path);
    out += path.empty() ? "/" : path;
    if (parts.query) out += "?" + *parts.query;
    return out;
}

std::optional<std::string> resolve_and_normalize(std::string_view base, std::string_view href) {
    std::string cleaned(trim(href));
    auto resolved = resolve_reference(base, cleaned);
    if (!resolved) return std::nullopt;
    return normalize_url(*resolved);
}

std::string HttpUrl::authority() const {
    return port ? host + ":" + std::to_string(*port) : host;
}

std::optional<HttpUrl> parse_http_url(std::string_view normalized) {
    auto canonical = normalize_url(normalized);
    if (!canonical) return std::nullopt;
    UrlParts parts = split_reference(*canonical);
    HttpUrl out;
    out.scheme = *parts.scheme;
    std::string_view authority = *parts.authority;
    auto close = authority.rfind(']');
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos && (close == std::string_view::npos || colon > close)) {
        out.host = std::string(authority.substr(0, colon));
        out.port = std::stoi(std::string(authority.substr(colon + 1)));
    } else {
        out.host = std::string(authority);
    }
    out.path_and_query = parts.path;
    if (parts.query) out.path_and_query += "?" + *parts.query;
    return out;
}

std::string authority_of(std::string_view url) {
    auto parsed = parse_http_url(url);
    return parsed ? parsed->authority() : std::string{};
}

}  // namespace threatcrawl
