#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>
#include <string>
#include <string_view>

#include "threatcrawl/embedding.hpp"
#include "threatcrawl/http_client.hpp"

namespace threatcrawl {

struct SidecarHealth {
    int http_status = 0;
    std::string status;
    std::string model_id;
    std::size_t dimension = 0;

    bool ready() const { return http_status == 200 && status == "ok"; }
};

struct SidecarOptions {
    std::string endpoint = "http://127.0.0.1:8765";
    std::string model_id = "bert-base-uncased";
    double timeout_s = 120.0;
    std::size_t batch_size = 64;
};

// Client for the embedding service: POST /embed, GET /health.
class SidecarBackend : public EmbeddingBackend {
public:
    // Checks /health; throws BackendError unless the service is ready.
    static std::unique_ptr<SidecarBackend> connect(SidecarOptions options,
                                                   std::shared_ptr<HttpClient> client = nullptr);

    SidecarHealth health() const;

    std::string name() const override;
    std::size_t dimension() const override { return dim_; }
    EmbeddingVector embed_sentence(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

    // Truncation flags from the most recent batch, per sentence.
    std::vector<bool> last_truncated() const;

private:
    SidecarBackend(SidecarOptions options, std::shared_ptr<HttpClient> client, std::size_t dim);

    SidecarOptions options_;
    std::shared_ptr<HttpClient> client_;
    std::size_t dim_;
    mutable std::mutex mu_;
    mutable std::vector<bool> last_truncated_;
};

}  // namespace threatcrawl
