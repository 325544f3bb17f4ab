#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "threatcrawl/robots.hpp"

namespace threatcrawl {

struct UrlTask {
    std::string url;
    std::optional<std::string> parent;
    int depth = 0;
    SteadyClock::time_point enqueued_at = SteadyClock::now();
};

enum class EnqueueStatus { Accepted, Duplicate, Malformed };

struct FrontierOptions {
    double default_delay_s = 5.0;
    double robots_ttl_s = 24 * 3600.0;
    // Append-only log of enqueue/done events; enables resume when set.
    std::optional<std::filesystem::path> log_path;
};

// URL queue, visited set, per-authority timers and robots.txt cache.
//
// A claim from next_fetchable() marks the task's authority busy until
// release() is called with the time the request finished; the authority's
// crawl delay is measured from that point. All members are thread-safe.
class Frontier {
public:
    explicit Frontier(FrontierOptions options = {});

    // Normalizes task.url; rejects malformed or already-seen URLs.
    EnqueueStatus offer(UrlTask task);
    bool enqueue(UrlTask task) { return offer(std::move(task)) == EnqueueStatus::Accepted; }

    // Records a URL as seen without queueing it (redirect targets).
    bool mark_seen(const std::string& url);

    // Earliest-enqueued task whose authority is idle and whose delay has
    // elapsed. Claims that authority.
    std::optional<UrlTask> next_fetchable(SteadyClock::time_point now);

    // Ends a claim. `finished` is when the last request to the authority ended.
    void release(const std::string& authority, SteadyClock::time_point finished);

    // The URL has been fully handled (stored or skipped).
    void mark_complete(const std::string& url);

    void set_robots(RobotsRecord record);
    std::optional<RobotsRecord> robots_for(const std::string& authority,
                                           SteadyClock::time_point now) const;

    double crawl_delay(const std::string& authority) const;
    std::optional<SteadyClock::time_point> last_fetch(const std::string& authority) const;

    // Test hook: pretend the authority was last fetched at `when`.
    void set_last_fetch(const std::string& authority, SteadyClock::time_point when);

    std::size_t queued() const;
    std::size_t claimed() const;
    bool seen(const std::string& url) const;
    bool completed(const std::string& url) const;
    std::size_t completed_count() const;
    std::vector<std::string> queued_urls() const;

    const FrontierOptions& options() const { return options_; }

private:
    struct DomainTimer {
        std::optional<SteadyClock::time_point> last_fetch;
        bool busy = false;
    };

    double delay_locked(const std::string& authority) const;
    void append_log(const std::string& line);
    void load_log();

    FrontierOptions options_;
    mutable std::mutex mu_;
    std::deque<UrlTask> queue_;
    std::unordered_set<std::string> seen_;
    std::unordered_set<std::string> completed_;
    std::unordered_map<std::string, DomainTimer> timers_;
    std::unordered_map<std::string, RobotsRecord> robots_;
    std::ofstream log_;
};

}  // namespace threatcrawl
