#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace threatcrawl {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    double timeout_s = 30.0;
    std::size_t max_body_bytes = 5 * 1024 * 1024;
};

enum class TransportError { None, Timeout, Tls, Network, Oversize, Cancelled };

std::string_view transport_error_name(TransportError e);

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string location;
    std::string body;
    double elapsed_ms = 0.0;
};

struct HttpResult {
    TransportError error = TransportError::None;
    std::string message;
    HttpResponse response;

    bool ok() const { return error == TransportError::None; }
};

// Single request/response exchange. Redirects are never followed here.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual HttpResult perform(const HttpRequest& request, const std::atomic<bool>* cancel = nullptr) = 0;
};

// libcurl-backed client. Honors the usual *_proxy environment variables.
class CurlHttpClient : public HttpClient {
public:
    CurlHttpClient();
    HttpResult perform(const HttpRequest& request, const std::atomic<bool>* cancel = nullptr) override;
};

}  // namespace threatcrawl
