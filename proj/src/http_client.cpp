#include "threatcrawl/http_client.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <mutex>

#include <curl/curl.h>

namespace threatcrawl {

namespace {

struct Transfer {
    std::string* body;
    std::size_t limit;
    bool oversize = false;
    std::string content_type;
    std::string location;
    const std::atomic<bool>* cancel;
};

std::size_t on_body(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* t = static_cast<Transfer*>(user);
    std::size_t n = size * nmemb;
    if (t->body->size() + n > t->limit) {
        t->oversize = true;
        return 0;  // aborts the transfer
    }
    t->body->append(data, n);
    return n;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::size_t on_header(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* t = static_cast<Transfer*>(user);
    std::string line(data, size * nmemb);
    auto colon = line.find(':');
    if (colon != std::string::npos) {
        std::string key = line.substr(0, colon);
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        std::string value = trim(line.substr(colon + 1));
        if (key == "content-type") t->content_type = value;
        if (key == "location") t->location = value;
    }
    return size * nmemb;
}

int on_progress(void* user, curl_off_t, curl_off_t, curl_off_t, curl_off_t) {
    auto* t = static_cast<Transfer*>(user);
    return t->cancel && t->cancel->load() ? 1 : 0;
}

struct CurlDeleter {
    void operator()(CURL* c) const { curl_easy_cleanup(c); }
};
struct SlistDeleter {
    void operator()(curl_slist* l) const { curl_slist_free_all(l); }
};

}  // namespace

std::string_view transport_error_name(TransportError e) {
    switch (e) {
        case TransportError::None: return "none";
        case TransportError::Timeout: return "timeout";
        case TransportError::Tls: return "tls";
        case TransportError::Network: return "network";
        case TransportError::Oversize: return "oversize";
        case TransportError::Cancelled: return "cancelled";
    }
    return "?";
}

CurlHttpClient::CurlHttpClient() {
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

HttpResult CurlHttpClient::perform(const HttpRequest& request, const std::atomic<bool>* cancel) {
    HttpResult result;
    std::unique_ptr<CURL, CurlDeleter> curl(curl_easy_init());
    if (!curl) {
        result.error = TransportError::Network;
        result.message = "curl_easy_init failed";
        return result;
    }

    Transfer t{&result.response.body, request.max_body_bytes, false, {}, {}, cancel};
    curl_slist* raw_headers = nullptr;
    for (const auto& [k, v] : request.headers) {
        std::string line = k + ": " + v;
        raw_headers = curl_slist_append(raw_headers, line.c_str());
    }
    std::unique_ptr<curl_slist, SlistDeleter> headers(raw_headers);

    CURL* h = curl.get();
    curl_easy_setopt(h, CURLOPT_URL, request.url.c_str());
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 0L);
    curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(h, CURLOPT_TIMEOUT_MS, static_cast<long>(request.timeout_s * 1000));
    curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT_MS, static_cast<long>(std::min(request.timeout_s, 15.0) * 1000));
    curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, on_body);
    curl_easy_setopt(h, CURLOPT_WRITEDATA, &t);
    curl_easy_setopt(h, CURLOPT_HEADERFUNCTION, on_header);
    curl_easy_setopt(h, CURLOPT_HEADERDATA, &t);
    curl_easy_setopt(h, CURLOPT_NOPROGRESS, 0L);
    curl_easy_setopt(h, CURLOPT_XFERINFOFUNCTION, on_progress);
    curl_easy_setopt(h, CURLOPT_XFERINFODATA, &t);
    curl_easy_setopt(h, CURLOPT_ACCEPT_ENCODING, "");
    if (headers) curl_easy_setopt(h, CURLOPT_HTTPHEADER, headers.get());
    if (request.method == "POST") {
        curl_easy_setopt(h, CURLOPT_POST, 1L);
        curl_easy_setopt(h, CURLOPT_POSTFIELDS, request.body.c_str());
        curl_easy_setopt(h, CURLOPT_POSTFIELDSIZE, static_cast<long>(request.body.size()));
    }

    CURLcode rc = curl_easy_perform(h);

    long status = 0;
    curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &status);
    double total = 0.0;
    curl_easy_getinfo(h, CURLINFO_TOTAL_TIME, &total);
    result.response.status = static_cast<int>(status);
    result.response.content_type = t.content_type;
    result.response.location = t.location;
    result.response.elapsed_ms = total * 1000.0;

    if (rc == CURLE_OK) return result;

    result.message = curl_easy_strerror(rc);
    if (t.oversize) {
        result.error = TransportError::Oversize;
    } else if (rc == CURLE_ABORTED_BY_CALLBACK) {
        result.error = TransportError::Cancelled;
    } else if (rc == CURLE_OPERATION_TIMEDOUT) {
        result.error = TransportError::Timeout;
    } else if (rc == CURLE_SSL_CONNECT_ERROR || rc == CURLE_PEER_FAILED_VERIFICATION ||
               rc == CURLE_SSL_CERTPROBLEM || rc == CURLE_SSL_CIPHER || rc == CURLE_SSL_CACERT_BADFILE) {
        result.error = TransportError::Tls;
    } else {
        result.error = TransportError::Network;
    }
    return result;
}

}  // namespace threatcrawl
