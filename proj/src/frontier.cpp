#include "threatcrawl/frontier.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "threatcrawl/log.hpp"
#include "threatcrawl/url.hpp"

namespace threatcrawl {

using nlohmann::json;

Frontier::Frontier(FrontierOptions options) : options_(std::move(options)) {
    if (options_.log_path) {
        load_log();
        log_.open(*options_.log_path, std::ios::app);
        if (!log_) {
            throw std::runtime_error("cannot open frontier log " + options_.log_path->string());
        }
    }
}

void Frontier::load_log() {
    std::ifstream in(*options_.log_path);
    if (!in) return;

    std::vector<UrlTask> enqueued;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        // A torn final line from an interrupted run is skipped.
        if (row.is_discarded() || !row.contains("op")) continue;
        const auto op = row["op"].get<std::string>();
        const auto url = row.value("url", std::string{});
        if (op == "enqueue") {
            if (!seen_.insert(url).second) continue;
            UrlTask task;
            task.url = url;
            if (row.contains("parent") && row["parent"].is_string()) {
                task.parent = row["parent"].get<std::string>();
            }
            task.depth = row.value("depth", 0);
            enqueued.push_back(std::move(task));
        } else if (op == "seen") {
            seen_.insert(url);
        } else if (op == "done") {
            completed_.insert(url);
        }
    }
    for (auto& task : enqueued) {
        if (!completed_.count(task.url)) queue_.push_back(std::move(task));
    }
}

void Frontier::append_log(const std::string& line) {
    if (!log_.is_open()) return;
    log_ << line << '\n';
    log_.flush();
}

EnqueueStatus Frontier::offer(UrlTask task) {
    auto normalized = normalize_url(task.url);
    if (!normalized) {
        log_debug("frontier: rejected malformed URL '" + task.url + "'");
        return EnqueueStatus::Malformed;
    }
    task.url = std::move(*normalized);

    std::lock_guard lock(mu_);
    if (!seen_.insert(task.url).second) return EnqueueStatus::Duplicate;

    json row = {{"op", "enqueue"}, {"url", task.url}, {"depth", task.depth}};
    row["parent"] = task.parent ? json(*task.parent) : json(nullptr);
    append_log(row.dump());
    queue_.push_back(std::move(task));
    return EnqueueStatus::Accepted;
}

bool Frontier::mark_seen(const std::string& url) {
    std::lock_guard lock(mu_);
    if (!seen_.insert(url).second) return false;
    append_log(json{{"op", "seen"}, {"url", url}}.dump());
    return true;
}

double Frontier::delay_locked(const std::string& authority) const {
    auto it = robots_.find(authority);
    return it == robots_.end() ? options_.default_delay_s : it->second.crawl_delay_s;
}

std::optional<UrlTask> Frontier::next_fetchable(SteadyClock::time_point now) {
    std::lock_guard lock(mu_);
    std::unordered_set<std::string> blocked;
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
        std::string authority = authority_of(it->url);
        if (blocked.count(authority)) continue;

        auto& timer = timers_[authority];
        bool ready = !timer.busy;
        if (ready && timer.last_fetch) {
            std::chrono::duration<double> since = now - *timer.last_fetch;
            ready = since.count() >= delay_locked(authority);
        }
        if (!ready) {
            blocked.insert(std::move(authority));
            continue;
        }
        timer.busy = true;
        timer.last_fetch = now;
        UrlTask task = std::move(*it);
        queue_.erase(it);
        return task;
    }
    return std::nullopt;
}

void Frontier::release(const std::string& authority, SteadyClock::time_point finished) {
    std::lock_guard lock(mu_);
    auto& timer = timers_[authority];
    timer.busy = false;
    if (!timer.last_fetch || finished > *timer.last_fetch) timer.last_fetch = finished;
}

void Frontier::mark_complete(const std::string& url) {
    std::lock_guard lock(mu_);
    if (completed_.insert(url).second) append_log(json{{"op", "done"}, {"url", url}}.dump());
}

void Frontier::set_robots(RobotsRecord record) {
    std::lock_guard lock(mu_);
    auto key = record.domain;
    robots_[key] = std::move(record);
}

std::optional<RobotsRecord> Frontier::robots_for(const std::string& authority,
                                                 SteadyClock::time_point now) const {
    std::lock_guard lock(mu_);
    auto it = robots_.find(authority);
    if (it == robots_.end() || it->second.expired(now)) return std::nullopt;
    return it->second;
}

double Frontier::crawl_delay(const std::string& authority) const {
    std::lock_guard lock(mu_);
    return delay_locked(authority);
}

std::optional<SteadyClock::time_point> Frontier::last_fetch(const std::string& authority) const {
    std::lock_guard lock(mu_);
    auto it = timers_.find(authority);
    if (it == timers_.end()) return std::nullopt;
    return it->second.last_fetch;
}

void Frontier::set_last_fetch(const std::string& authority, SteadyClock::time_point when) {
    std::lock_guard lock(mu_);
    timers_[authority].last_fetch = when;
}

std::size_t Frontier::queued() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

std::size_t Frontier::claimed() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [_, timer] : timers_) n += timer.busy ? 1 : 0;
    return n;
}

bool Frontier::seen(const std::string& url) const {
    std::lock_guard lock(mu_);
    return seen_.count(url) > 0;
}

bool Frontier::completed(const std::string& url) const {
    std::lock_guard lock(mu_);
    return completed_.count(url) > 0;
}

std::size_t Frontier::completed_count() const {
    std::lock_guard lock(mu_);
    return completed_.size();
}

std::vector<std::string> Frontier::queued_urls() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    out.reserve(queue_.size());
    for (const auto& t : queue_) out.push_back(t.url);
    return out;
}

}  // namespace threatcrawl
