#include "threatcrawl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "threatcrawl/mock_backend.hpp"
#include "threatcrawl/sidecar_backend.hpp"

namespace threatcrawl {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, std::string value) {
    std::transform(value.begin(), value.end(), value.begin(), [](unsigned char c) { return std::tolower(c); });
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

void CrawlConfig::validate() const {
    if (max_pages < 1) throw ConfigError("max_pages must be >= 1");
    if (retriever_workers < 1 || extractor_workers < 1) throw ConfigError("worker counts must be >= 1");
    if (default_delay_s < 0) throw ConfigError("default_delay_s must be >= 0");
    if (timeout_s <= 0) throw ConfigError("timeout_s must be > 0");
    if (retries < 0) throw ConfigError("retries must be >= 0");
    try {
        validate_budget(budget);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

Budget parse_budget(std::string_view text) {
    auto parts = split(text, ':');
    const std::string& mode = parts[0];
    if (mode == "fixed" && parts.size() == 2) {
        FixedBudget b{parse_number<int>("budget", parts[1])};
        try {
            validate_budget(b);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        return b;
    }
    if (mode == "adaptive" && (parts.size() == 2 || parts.size() == 3)) {
        AdaptiveBudget b;
        b.gradient_limit = parse_number<double>("budget", parts[1]);
        if (parts.size() == 3) b.hard_cap = parse_number<int>("budget", parts[2]);
        try {
            validate_budget(b);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        return b;
    }
    throw ConfigError("budget must be fixed:<n> or adaptive:<limit>[:<cap>], got '" + std::string(text) + "'");
}

std::string budget_to_string(const Budget& budget) {
    std::ostringstream out;
    if (const auto* f = std::get_if<FixedBudget>(&budget)) {
        out << "fixed:" << f->sentences;
    } else {
        const auto& a = std::get<AdaptiveBudget>(budget);
        out << "adaptive:" << a.gradient_limit << ':' << a.hard_cap;
    }
    return out.str();
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == '[') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (!value.empty() && value.front() == '"') {
            auto close = value.find('"', 1);
            if (close == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": unterminated string");
            value = value.substr(1, close - 1);
        } else if (auto hash = value.find('#'); hash != std::string::npos) {
            value = trim(std::string_view(value).substr(0, hash));
        }
        out[key] = value;
    }
    return out;
}

void apply_setting(CrawlConfig& c, const std::string& key, const std::string& value) {
    if (key == "seed_file") c.seed_file = value;
    else if (key == "blacklist_file") c.blacklist_file = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    else if (key == "model_file") c.model_file = value;
    else if (key == "backend") c.backend = value;
    else if (key == "sidecar_model") c.sidecar_model = value;
    else if (key == "retriever_workers") c.retriever_workers = parse_number<int>(key, value);
    else if (key == "extractor_workers") c.extractor_workers = parse_number<int>(key, value);
    else if (key == "default_delay_s") c.default_delay_s = parse_number<double>(key, value);
    else if (key == "timeout_s") c.timeout_s = parse_number<double>(key, value);
    else if (key == "max_pages") c.max_pages = parse_number<int>(key, value);
    else if (key == "distance_mode") {
        auto m = parse_distance_mode(value);
        if (!m) throw ConfigError("distance_mode must be max or average, got '" + value + "'");
        c.distance_mode = *m;
    } else if (key == "budget") c.budget = parse_budget(value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "info_url") c.info_url = value;
    else if (key == "robots_ttl_s") c.robots_ttl_s = parse_number<double>(key, value);
    else if (key == "retries") c.retries = parse_number<int>(key, value);
    else if (key == "follow_all_links") c.follow_all_links = parse_bool(key, value);
    else if (key == "shuffle_seed") c.shuffle_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "resume") c.resume = parse_bool(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

CrawlConfig load_config_file(const std::filesystem::path& path, CrawlConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_key_values(ss.str())) apply_setting(base, k, v);
    return base;
}

std::unique_ptr<EmbeddingBackend> make_backend(const std::string& spec, const std::string& sidecar_model) {
    if (spec == "mock" || spec.rfind("mock:", 0) == 0) {
        auto parts = split(spec, ':');
        std::uint64_t seed = parts.size() > 1 ? parse_number<std::uint64_t>("backend", parts[1]) : 42;
        std::size_t dim = parts.size() > 2 ? parse_number<std::size_t>("backend", parts[2]) : 256;
        if (parts.size() > 3 || dim == 0) throw ConfigError("backend must be mock[:seed[:dim]], got '" + spec + "'");
        return std::make_unique<MockBackend>(seed, dim);
    }
    if (spec.rfind("sidecar:", 0) == 0) {
        SidecarOptions opts;
        opts.endpoint = spec.substr(8);
        opts.model_id = sidecar_model;
        return SidecarBackend::connect(opts);
    }
    throw ConfigError("unknown backend '" + spec + "' (expected mock[:seed[:dim]] or sidecar:<url>)");
}

}  // namespace threatcrawl
