#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "threatcrawl/labels.hpp"

namespace threatcrawl {

inline constexpr std::size_t kDefaultMaxPageBytes = 5 * 1024 * 1024;

struct StoredDocument {
    std::string url;
    int fetch_status = 0;
    std::string content_type;
    std::string raw_body;
    std::optional<std::string> extracted_text;
    std::optional<std::vector<std::string>> extracted_links;
    std::optional<ClassificationResult> classification;
    bool processed = false;
    double timestamp = 0.0;  // seconds since the Unix epoch
};

// Retriable persistence failure (disk full, permission, ...).
class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One line of index.jsonl. Later lines for a URL supersede earlier ones.
struct IndexRow {
    std::string url;
    int status = 0;
    std::string content_type;
    std::string blob;
    bool processed = false;
    std::optional<std::string> label;
    std::optional<double> distance;
    std::optional<double> relative_distance;
    double timestamp = 0.0;
    bool relevant = false;
    std::optional<std::string> text_blob;
    std::vector<std::string> links;
    std::vector<LabelScore> scores;
};

IndexRow parse_index_row(const std::string& line);
std::string serialize_index_row(const IndexRow& row);

// Reads an index file and keeps the latest row per URL, in first-seen order.
// Torn or unparseable lines are skipped.
std::vector<IndexRow> load_index(const std::filesystem::path& index_file);

// Content-addressed blob directory plus an append-only JSON-lines index:
//   <root>/index.jsonl
//   <root>/blobs/<sha[0..2]>/<sha>
class DocumentStore {
public:
    explicit DocumentStore(std::filesystem::path root, std::size_t max_page_bytes = kDefaultMaxPageBytes);

    void store_raw(const StoredDocument& doc);
    // Requires processed, extracted_text and classification to be set.
    void store_processed(const StoredDocument& doc);

    std::optional<StoredDocument> get(const std::string& url) const;
    std::vector<IndexRow> rows() const;
    std::size_t index_lines() const;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path index_path() const { return root_ / "index.jsonl"; }
    std::filesystem::path blob_path(const std::string& digest) const;

private:
    std::string write_blob(const std::string& bytes);
    std::string read_blob(const std::string& digest) const;
    void append(const IndexRow& row);

    std::filesystem::path root_;
    std::size_t max_page_bytes_;
    mutable std::mutex mu_;
    std::ofstream index_;
    std::unordered_map<std::string, IndexRow> latest_;
    std::vector<std::string> order_;
    std::size_t lines_ = 0;
};

}  // namespace threatcrawl
