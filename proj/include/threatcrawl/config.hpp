#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "threatcrawl/classifier.hpp"
#include "threatcrawl/embedding.hpp"

namespace threatcrawl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CrawlConfig {
    std::filesystem::path seed_file;
    std::optional<std::filesystem::path> blacklist_file;
    std::filesystem::path model_file;
    std::string backend = "mock:42";
    std::string sidecar_model = "bert-base-uncased";
    int retriever_workers = 2;
    int extractor_workers = 2;
    double default_delay_s = 5.0;
    double timeout_s = 30.0;
    int max_pages = 1000;
    DistanceMode distance_mode = DistanceMode::Max;
    Budget budget = AdaptiveBudget{};
    std::filesystem::path output_dir = "crawl-out";
    std::string info_url = "https://example.org/threatcrawl-clone";
    double robots_ttl_s = 24 * 3600.0;
    int retries = 2;
    // Baseline comparison: follow every document's links, shuffled.
    bool follow_all_links = false;
    std::optional<std::uint64_t> shuffle_seed;
    bool resume = true;

    void validate() const;
};

// "fixed:<n>" or "adaptive:<limit>[:<cap>]".
Budget parse_budget(std::string_view text);
std::string budget_to_string(const Budget& budget);

// key = value lines; '#' starts a comment; values may be double-quoted.
std::map<std::string, std::string> parse_key_values(std::string_view text);

// Applies one setting; throws ConfigError on unknown keys or bad values.
void apply_setting(CrawlConfig& config, const std::string& key, const std::string& value);

CrawlConfig load_config_file(const std::filesystem::path& path, CrawlConfig base = {});

// "mock[:seed[:dim]]" or "sidecar:<endpoint>". Sidecar backends are
// health-checked; failures raise BackendError.
std::unique_ptr<EmbeddingBackend> make_backend(const std::string& spec, const std::string& sidecar_model = "bert-base-uncased");

}  // namespace threatcrawl
