#include "threatcrawl/sidecar_backend.hpp"

#include <cmath>
#include <mutex>

#include <nlohmann/json.hpp>

namespace threatcrawl {

using nlohmann::json;

namespace {

std::string trim_slash(std::string s) {
    while (!s.empty() && s.back() == '/') s.pop_back();
    return s;
}

}  // namespace

SidecarBackend::SidecarBackend(SidecarOptions options, std::shared_ptr<HttpClient> client, std::size_t dim)
    : options_(std::move(options)), client_(std::move(client)), dim_(dim) {}

std::unique_ptr<SidecarBackend> SidecarBackend::connect(SidecarOptions options, std::shared_ptr<HttpClient> client) {
    options.endpoint = trim_slash(options.endpoint);
    if (!client) client = std::make_shared<CurlHttpClient>();
    std::unique_ptr<SidecarBackend> backend(new SidecarBackend(options, client, 0));
    auto h = backend->health();
    if (!h.ready()) {
        throw BackendError("embedding service at " + options.endpoint + " not ready (HTTP " +
                           std::to_string(h.http_status) + ", status '" + h.status + "')");
    }
    if (h.dimension == 0) throw BackendError("embedding service reported dimension 0");
    if (!h.model_id.empty() && h.model_id != options.model_id) {
        throw BackendError("embedding service serves model '" + h.model_id + "', expected '" + options.model_id + "'");
    }
    backend->dim_ = h.dimension;
    return backend;
}

SidecarHealth SidecarBackend::health() const {
    HttpRequest req;
    req.url = options_.endpoint + "/health";
    req.timeout_s = std::min(options_.timeout_s, 10.0);
    auto res = client_->perform(req);
    if (!res.ok()) throw BackendError("health check failed: " + res.message);

    SidecarHealth h;
    h.http_status = res.response.status;
    auto body = json::parse(res.response.body, nullptr, false);
    if (body.is_object()) {
        h.status = body.value("status", "");
        h.model_id = body.value("model_id", "");
        if (body.contains("D") && body["D"].is_number_unsigned()) h.dimension = body["D"].get<std::size_t>();
    }
    return h;
}

std::string SidecarBackend::name() const { return "sidecar:" + options_.model_id; }

EmbeddingVector SidecarBackend::embed_sentence(std::string_view text) const {
    std::string s(text);
    return embed_batch(std::span<const std::string>(&s, 1)).front();
}

std::vector<EmbeddingVector> SidecarBackend::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    std::vector<bool> truncated;
    out.reserve(texts.size());

    for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
        auto chunk = texts.subspan(start, std::min(options_.batch_size, texts.size() - start));
        json body = {{"sentences", json::array()}, {"model_id", options_.model_id}};
        for (const auto& t : chunk) {
            if (t.empty()) throw BackendError("empty sentence sent to embedding service");
            body["sentences"].push_back(t);
        }

        HttpRequest req;
        req.method = "POST";
        req.url = options_.endpoint + "/embed";
        req.headers = {{"Content-Type", "application/json"}};
        req.body = body.dump();
        req.timeout_s = options_.timeout_s;
        req.max_body_bytes = 512u * 1024 * 1024;
        auto res = client_->perform(req);
        if (!res.ok()) throw BackendError("embed request failed: " + res.message);
        if (res.response.status != 200) {
            throw BackendError("embed request returned HTTP " + std::to_string(res.response.status) + ": " +
                               res.response.body.substr(0, 200));
        }

        auto parsed = json::parse(res.response.body, nullptr, false);
        if (!parsed.is_object() || !parsed.contains("vectors") || !parsed["vectors"].is_array()) {
            throw BackendError("malformed embed response");
        }
        const auto& vectors = parsed["vectors"];
        if (vectors.size() != chunk.size()) {
            throw BackendError("embed response has " + std::to_string(vectors.size()) + " vectors for " +
                               std::to_string(chunk.size()) + " sentences");
        }
        for (const auto& v : vectors) {
            if (!v.is_array() || v.size() != dim_) {
                throw BackendError("embed response vector has wrong dimension (expected " + std::to_string(dim_) + ")");
            }
            EmbeddingVector ev;
            ev.values.reserve(dim_);
            for (const auto& x : v) {
                if (!x.is_number()) throw BackendError("non-numeric component in embed response");
                double d = x.get<double>();
                if (!std::isfinite(d)) throw BackendError("non-finite component in embed response");
                ev.values.push_back(d);
            }
            out.push_back(std::move(ev));
        }
        const auto flags = parsed.value("truncated_flags", json::array());
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            truncated.push_back(i < flags.size() && flags[i].is_boolean() && flags[i].get<bool>());
        }
    }

    std::lock_guard lock(mu_);
    last_truncated_ = std::move(truncated);
    return out;
}

std::vector<bool> SidecarBackend::last_truncated() const {
    std::lock_guard lock(mu_);
    return last_truncated_;
}

}  // namespace threatcrawl
