#include "threatcrawl/document_store.hpp"

#include <chrono>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threatcrawl/encoding.hpp"

namespace threatcrawl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

double now_epoch() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

std::string serialize_index_row(const IndexRow& row) {
    json j;
    j["url"] = row.url;
    j["status"] = row.status;
    j["content_type"] = row.content_type;
    j["blob"] = row.blob;
    j["processed"] = row.processed;
    j["label"] = opt(row.label);
    j["distance"] = opt(row.distance);
    j["relative_distance"] = opt(row.relative_distance);
    j["timestamp"] = row.timestamp;
    if (row.processed) {
        j["relevant"] = row.relevant;
        j["text_blob"] = opt(row.text_blob);
        j["links"] = row.links;
        json scores = json::array();
        for (const auto& s : row.scores) {
            scores.push_back({{"label", label_name(s.label)},
                              {"distance", s.distance},
                              {"relative_distance", s.relative_distance}});
        }
        j["scores"] = std::move(scores);
    }
    return j.dump();
}

IndexRow parse_index_row(const std::string& line) {
    json j = json::parse(line);
    IndexRow row;
    row.url = j.at("url").get<std::string>();
    row.status = j.value("status", 0);
    row.content_type = j.value("content_type", std::string{});
    row.blob = j.value("blob", std::string{});
    row.processed = j.value("processed", false);
    if (j.contains("label") && j["label"].is_string()) row.label = j["label"].get<std::string>();
    if (j.contains("distance") && j["distance"].is_number()) row.distance = j["distance"].get<double>();
    if (j.contains("relative_distance") && j["relative_distance"].is_number()) {
        row.relative_distance = j["relative_distance"].get<double>();
    }
    row.timestamp = j.value("timestamp", 0.0);
    row.relevant = j.value("relevant", false);
    if (j.contains("text_blob") && j["text_blob"].is_string()) {
        row.text_blob = j["text_blob"].get<std::string>();
    }
    if (j.contains("links") && j["links"].is_array()) {
        row.links = j["links"].get<std::vector<std::string>>();
    }
    if (j.contains("scores") && j["scores"].is_array()) {
        for (const auto& s : j["scores"]) {
            auto label = parse_label(s.value("label", std::string{}));
            if (!label) continue;
            // Non-finite values are written as null by the serializer.
            auto number = [&](const char* key) {
                return s.contains(key) && s[key].is_number() ? s[key].get<double>()
                                                             : std::numeric_limits<double>::infinity();
            };
            row.scores.push_back({*label, number("distance"), number("relative_distance")});
        }
    }
    return row;
}

std::vector<IndexRow> load_index(const fs::path& index_file) {
    std::ifstream in(index_file);
    std::unordered_map<std::string, std::size_t> pos;
    std::vector<IndexRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        IndexRow row;
        try {
            row = parse_index_row(line);
        } catch (const std::exception&) {
            continue;
        }
        auto [it, inserted] = pos.emplace(row.url, rows.size());
        if (inserted) {
            rows.push_back(std::move(row));
        } else {
            rows[it->second] = std::move(row);
        }
    }
    return rows;
}

DocumentStore::DocumentStore(fs::path root, std::size_t max_page_bytes)
    : root_(std::move(root)), max_page_bytes_(max_page_bytes) {
    std::error_code ec;
    fs::create_directories(root_ / "blobs", ec);
    if (ec) throw StoreError("cannot create store directory " + root_.string() + ": " + ec.message());

    std::ifstream existing(index_path());
    std::string line;
    while (std::getline(existing, line)) {
        if (line.empty()) continue;
        try {
            IndexRow row = parse_index_row(line);
            if (!latest_.count(row.url)) order_.push_back(row.url);
            latest_[row.url] = std::move(row);
            ++lines_;
        } catch (const std::exception&) {
        }
    }

    index_.open(index_path(), std::ios::app);
    if (!index_) throw StoreError("cannot open index " + index_path().string());
}

fs::path DocumentStore::blob_path(const std::string& digest) const {
    return root_ / "blobs" / digest.substr(0, 2) / digest;
}

std::string DocumentStore::write_blob(const std::string& bytes) {
    std::string digest = sha256_hex(bytes);
    fs::path path = blob_path(digest);
    if (fs::exists(path)) return digest;

    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw StoreError("cannot create blob directory: " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw StoreError("cannot write blob " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw StoreError("cannot commit blob " + path.string() + ": " + ec.message());
    return digest;
}

std::string DocumentStore::read_blob(const std::string& digest) const {
    std::ifstream in(blob_path(digest), std::ios::binary);
    if (!in) throw StoreError("missing blob " + digest);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void DocumentStore::append(const IndexRow& row) {
    index_ << serialize_index_row(row) << '\n';
    index_.flush();
    if (!index_) throw StoreError("cannot append to index " + index_path().string());
    if (!latest_.count(row.url)) order_.push_back(row.url);
    latest_[row.url] = row;
    ++lines_;
}

void DocumentStore::store_raw(const StoredDocument& doc) {
    if (doc.raw_body.size() > max_page_bytes_) {
        throw std::logic_error("raw body of " + doc.url + " exceeds the page size limit");
    }
    std::lock_guard lock(mu_);
    IndexRow row;
    row.url = doc.url;
    row.status = doc.fetch_status;
    row.content_type = doc.content_type;
    row.blob = write_blob(doc.raw_body);
    row.processed = false;
    row.timestamp = doc.timestamp > 0 ? doc.timestamp : now_epoch();
    append(row);
}

void DocumentStore::store_processed(const StoredDocument& doc) {
    if (!doc.processed || !doc.extracted_text || !doc.classification) {
        throw std::logic_error("store_processed: " + doc.url +
                               " lacks processed flag, extracted text or classification");
    }
    if (doc.raw_body.size() > max_page_bytes_) {
        throw std::logic_error("raw body of " + doc.url + " exceeds the page size limit");
    }
    std::lock_guard lock(mu_);
    IndexRow row;
    row.url = doc.url;
    row.status = doc.fetch_status;
    row.content_type = doc.content_type;
    row.blob = write_blob(doc.raw_body);
    row.processed = true;
    row.text_blob = write_blob(*doc.extracted_text);
    row.timestamp = doc.timestamp > 0 ? doc.timestamp : now_epoch();
    if (doc.extracted_links) row.links = *doc.extracted_links;

    const auto& cls = *doc.classification;
    row.relevant = cls.relevant;
    row.scores = cls.scores;
    if (cls.assigned) row.label = std::string(label_name(*cls.assigned));
    if (auto best = cls.best()) {
        row.distance = best->distance;
        row.relative_distance = best->relative_distance;
    }
    append(row);
}

std::optional<StoredDocument> DocumentStore::get(const std::string& url) const {
    std::lock_guard lock(mu_);
    auto it = latest_.find(url);
    if (it == latest_.end()) return std::nullopt;
    const IndexRow& row = it->second;

    StoredDocument doc;
    doc.url = row.url;
    doc.fetch_status = row.status;
    doc.content_type = row.content_type;
    doc.raw_body = read_blob(row.blob);
    doc.processed = row.processed;
    doc.timestamp = row.timestamp;
    if (row.processed) {
        if (row.text_blob) doc.extracted_text = read_blob(*row.text_blob);
        doc.extracted_links = row.links;
        ClassificationResult cls;
        cls.scores = row.scores;
        cls.relevant = row.relevant;
        if (row.label) cls.assigned = parse_label(*row.label);
        doc.classification = std::move(cls);
    }
    return doc;
}

std::vector<IndexRow> DocumentStore::rows() const {
    std::lock_guard lock(mu_);
    std::vector<IndexRow> out;
    out.reserve(order_.size());
    for (const auto& url : order_) out.push_back(latest_.at(url));
    return out;
}

std::size_t DocumentStore::index_lines() const {
    std::lock_guard lock(mu_);
    return lines_;
}

}  // namespace threatcrawl
