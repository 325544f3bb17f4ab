#include "fixture_server.hpp"

#include <stdexcept>

#include "httplib.h"

namespace threatcrawl::testing {

struct FixtureServer::Impl {
    httplib::Server server;
    std::thread thread;
    mutable std::mutex mu;
    std::map<std::string, FixtureHandler> routes;
    std::vector<RecordedRequest> log;
};

FixtureServer::FixtureServer() : impl_(std::make_unique<Impl>()) {
    auto handle = [this](const httplib::Request& req, httplib::Response& res) {
        RecordedRequest rec;
        rec.at = Clock::now();
        rec.method = req.method;
        rec.target = req.target.empty() ? req.path : req.target;
        rec.user_agent = req.get_header_value("User-Agent");
        rec.body = req.body;
        FixtureHandler handler;
        {
            std::lock_guard lock(impl_->mu);
            impl_->log.push_back(rec);
            auto it = impl_->routes.find(rec.target);
            if (it == impl_->routes.end()) it = impl_->routes.find(req.path);
            if (it != impl_->routes.end()) handler = it->second;
        }
        FixtureResponse out;
        if (handler) {
            out = handler(rec);
        } else {
            out.status = 404;
            out.content_type = "text/plain";
            out.body = "not found";
        }
        if (out.delay_s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(out.delay_s));
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_content(out.body, out.content_type);
    };
    impl_->server.Get(".*", handle);
    impl_->server.Post(".*", handle);
    impl_->server.Put(".*", handle);
    impl_->server.Delete(".*", handle);
    impl_->server.set_keep_alive_max_count(1);
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("fixture server failed to bind");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

FixtureServer::~FixtureServer() { stop(); }

void FixtureServer::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

void FixtureServer::set(const std::string& target, FixtureResponse response) {
    set_handler(target, [response](const RecordedRequest&) { return response; });
}

void FixtureServer::set_html(const std::string& target, std::string html) {
    FixtureResponse r;
    r.body = std::move(html);
    set(target, std::move(r));
}

void FixtureServer::set_handler(const std::string& target, FixtureHandler handler) {
    std::lock_guard lock(impl_->mu);
    impl_->routes[target] = std::move(handler);
}

std::string FixtureServer::origin() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<RecordedRequest> FixtureServer::requests() const {
    std::lock_guard lock(impl_->mu);
    return impl_->log;
}

std::size_t FixtureServer::count(const std::string& target) const {
    std::lock_guard lock(impl_->mu);
    std::size_t n = 0;
    for (const auto& r : impl_->log) n += r.target == target;
    return n;
}

}  // namespace threatcrawl::testing
