#include "threatcrawl/crawler.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "threatcrawl/evaluator.hpp"
#include "threatcrawl/extractor.hpp"
#include "threatcrawl/log.hpp"
#include "threatcrawl/url.hpp"

namespace threatcrawl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(5);

double epoch_seconds() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::vector<RankedDocument> rank_documents(std::span<const IndexRow> rows) {
    std::vector<RankedDocument> out;
    for (const auto& r : rows) {
        if (!r.processed || !r.relevant) continue;
        out.push_back({r.url, r.label.value_or(""), r.relative_distance.value_or(0.0)});
    }
    std::sort(out.begin(), out.end(), [](const RankedDocument& a, const RankedDocument& b) {
        if (a.rank_key != b.rank_key) return a.rank_key < b.rank_key;
        return a.url < b.url;
    });
    return out;
}

std::string ranked_csv(const std::vector<RankedDocument>& ranked) {
    std::ostringstream out;
    out << "rank,url,label,rank_key\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out << i + 1 << ',' << csv_field(ranked[i].url) << ',' << ranked[i].label << ',' << ranked[i].rank_key
            << '\n';
    }
    return out.str();
}

std::string report_summary(const CrawlReport& r) {
    std::ostringstream out;
    out << "processed:   " << r.processed << '\n'
        << "relevant:    " << r.relevant << '\n'
        << "harvest:     ";
    if (r.harvest_rate) out << std::fixed << std::setprecision(3) << *r.harvest_rate << '\n';
    else out << "n/a\n";
    out << std::defaultfloat << "fetched:     " << r.fetched << '\n'
        << "skipped:     " << r.skipped << '\n'
        << "errored:     " << r.errored << '\n'
        << "requests:    " << r.requests << '\n'
        << "queued left: " << r.frontier_remaining << '\n'
        << "graph:       " << r.graph.nodes << " nodes, " << r.graph.edges << " edges, " << r.graph.components
        << " components\n"
        << "runtime:     " << std::fixed << std::setprecision(1) << r.runtime_s << " s\n";
    if (r.stopped) out << "stopped:     " << r.stop_reason << '\n';
    for (const auto& [reason, n] : r.skip_counts) out << "  skip " << reason << ": " << n << '\n';
    return out.str();
}

std::vector<std::string> load_seeds(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read seed file " + path.string());
    std::vector<std::string> seeds;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (!line.empty()) seeds.push_back(line);
    }
    return seeds;
}

struct Crawler::Impl {
    struct Item {
        StoredDocument doc;
        std::string final_url;
        int depth = 0;
    };

    std::unique_ptr<Retriever> retriever;
    std::unique_ptr<Extractor> extractor;

    std::mutex mu;
    std::condition_variable cv;
    std::deque<Item> channel;
    int retrievers_alive = 0;
    std::string stop_reason;

    // Tasks accepted into the frontier and not yet finished.
    std::atomic<long> pending{0};
    // Processing slots handed out against max_pages.
    std::atomic<long> reserved{0};
    std::atomic<long> processed{0};
    std::atomic<long> relevant{0};
    std::atomic<long> fetched{0};
    std::atomic<long> skipped{0};
    std::atomic<long> errored{0};
    std::atomic<long> requests{0};

    std::mutex skip_mu;
    std::ofstream skip_log;
    std::map<std::string, std::size_t> skip_counts;
};

Crawler::Crawler(CrawlConfig config, GroundTruthMap truths, const EmbeddingBackend& backend, Blacklist blacklist,
                 HttpClient& client)
    : config_(std::move(config)),
      truths_(std::move(truths)),
      backend_(backend),
      blacklist_(std::move(blacklist)),
      client_(client),
      impl_(std::make_unique<Impl>()) {
    config_.validate();
    fs::create_directories(config_.output_dir);
    if (!config_.resume && fs::exists(config_.output_dir / "index.jsonl")) {
        throw ConfigError("output_dir " + config_.output_dir.string() + " already holds a crawl and resume is off");
    }

    FrontierOptions fo;
    fo.default_delay_s = config_.default_delay_s;
    fo.robots_ttl_s = config_.robots_ttl_s;
    fo.log_path = config_.output_dir / "frontier.jsonl";
    frontier_ = std::make_unique<Frontier>(fo);
    store_ = std::make_unique<DocumentStore>(config_.output_dir);

    RetrieverOptions ro;
    ro.info_url = config_.info_url;
    ro.timeout_s = config_.timeout_s;
    ro.retries = config_.retries;
    ro.default_delay_s = config_.default_delay_s;
    ro.robots_ttl_s = config_.robots_ttl_s;
    impl_->retriever = std::make_unique<Retriever>(ro, client_);

    ExtractorOptions eo;
    eo.follow_all_links = config_.follow_all_links;
    eo.shuffle_seed = config_.shuffle_seed;
    eo.enqueue = [this](UrlTask task) {
        ++impl_->pending;
        if (frontier_->enqueue(std::move(task))) return true;
        --impl_->pending;
        return false;
    };
    impl_->extractor = std::make_unique<Extractor>(truths_, backend_, blacklist_, eo);

    impl_->skip_log.open(config_.output_dir / "skipped.jsonl", std::ios::app);
}

Crawler::~Crawler() = default;

void Crawler::emergency_stop(const std::string& reason) {
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->stop_reason.empty()) impl_->stop_reason = reason;
    }
    monitor_.request_stop();
    impl_->cv.notify_all();
}

void Crawler::retriever_loop(int id) {
    auto& s = *impl_;
    const auto* cancel = &monitor_.stop_flag();
    const long max_pages = config_.max_pages;

    auto finish_task = [&](const UrlTask& task, bool complete) {
        if (complete) frontier_->mark_complete(task.url);
        --s.reserved;
        --s.pending;
    };
    auto record_skip = [&](const SkipRecord& rec) {
        ++s.skipped;
        std::lock_guard lock(s.skip_mu);
        ++s.skip_counts[std::string(skip_reason_name(rec.reason))];
        json j = {{"url", rec.url},
                  {"reason", skip_reason_name(rec.reason)},
                  {"status", rec.status},
                  {"detail", rec.detail},
                  {"timestamp", epoch_seconds()}};
        s.skip_log << j.dump() << '\n';
        s.skip_log.flush();
        log_info("skip " + rec.url + ": " + std::string(skip_reason_name(rec.reason)) + " " + rec.detail);
    };

    while (!monitor_.stop_requested()) {
        if (s.pending.load() <= 0 || s.processed.load() >= max_pages) break;

        if (s.reserved.fetch_add(1) >= max_pages) {
            --s.reserved;
            std::this_thread::sleep_for(kPollInterval);
            continue;
        }
        auto task = frontier_->next_fetchable(SteadyClock::now());
        if (!task) {
            --s.reserved;
            std::this_thread::sleep_for(kPollInterval);
            continue;
        }

        auto parsed = parse_http_url(task->url);
        const std::string authority = parsed->authority();
        monitor_.report(id, WorkerState::Fetching);

        auto robots = frontier_->robots_for(authority, SteadyClock::now());
        if (!robots) {
            RobotsRecord rec;
            try {
                rec = impl_->retriever->fetch_robots(parsed->origin(), cancel);
            } catch (const RobotsUnavailable& e) {
                rec = deny_all_robots(authority, config_.default_delay_s);
                rec.fetched_at = SteadyClock::now();
                rec.ttl_s = std::min(300.0, config_.robots_ttl_s);
                log_warn("robots.txt unavailable for " + authority + ": " + e.what());
            }
            ++s.requests;
            frontier_->set_robots(rec);
            robots = rec;
            if (!rec.deny_all && rec.allowed(parsed->path_and_query)) {
                monitor_.report(id, WorkerState::WaitingDelay);
                interruptible_sleep(rec.crawl_delay_s, cancel);
                monitor_.report(id, WorkerState::Fetching);
            }
        }
        if (monitor_.stop_requested()) {
            frontier_->release(authority, SteadyClock::now());
            finish_task(*task, false);
            break;
        }

        auto outcome = impl_->retriever->fetch(
            *task, *robots, [&](const std::string& url) { return frontier_->mark_seen(url); }, cancel);
        s.requests += outcome.requests;
        frontier_->release(authority, SteadyClock::now());

        if (outcome.offsite_target) {
            UrlTask next;
            next.url = *outcome.offsite_target;
            next.parent = task->parent;
            next.depth = task->depth;
            ++s.pending;
            if (!frontier_->enqueue(std::move(next))) --s.pending;
        }
        if (outcome.skip) {
            bool cancelled = outcome.skip->reason == SkipReason::Cancelled;
            if (!cancelled) record_skip(*outcome.skip);
            finish_task(*task, !cancelled);
            monitor_.report(id, WorkerState::Idle);
            continue;
        }

        ++s.fetched;
        StoredDocument doc;
        doc.url = task->url;
        doc.fetch_status = outcome.result->status;
        doc.content_type = outcome.result->content_type;
        doc.raw_body = std::move(outcome.result->body);
        doc.timestamp = epoch_seconds();
        try {
            store_->store_raw(doc);
        } catch (const std::exception& e) {
            log_error("cannot store " + doc.url + ": " + e.what());
            ++s.errored;
            finish_task(*task, false);
            monitor_.report(id, WorkerState::Idle);
            continue;
        }
        {
            std::lock_guard lock(s.mu);
            s.channel.push_back({std::move(doc), outcome.result->final_url, task->depth});
        }
        s.cv.notify_one();
        monitor_.report(id, WorkerState::Idle);
    }
    monitor_.report(id, WorkerState::Stopped);
    {
        std::lock_guard lock(s.mu);
        --s.retrievers_alive;
    }
    s.cv.notify_all();
}

void Crawler::extractor_loop(int id) {
    auto& s = *impl_;
    while (true) {
        Impl::Item item;
        {
            std::unique_lock lock(s.mu);
            bool ready = s.cv.wait_for(lock, std::chrono::milliseconds(50), [&] {
                return monitor_.stop_requested() || !s.channel.empty() || s.retrievers_alive == 0;
            });
            if (!ready) continue;
            if (monitor_.stop_requested()) break;
            if (s.channel.empty()) break;  // retrievers are gone
            item = std::move(s.channel.front());
            s.channel.pop_front();
        }

        monitor_.report(id, WorkerState::Extracting);
        const std::string url = item.doc.url;
        monitor_.report(id, WorkerState::Classifying);
        ProcessedOutcome outcome;
        try {
            outcome = impl_->extractor->process(std::move(item.doc), item.depth, frontier_.get(), store_.get(),
                                                item.final_url);
        } catch (const std::exception& e) {
            outcome.errored = true;
            outcome.error = e.what();
            log_error("processing " + url + " failed: " + e.what());
        }

        if (outcome.errored) {
            ++s.errored;
            --s.reserved;
            if (outcome.backend_failure) {
                // Left incomplete so a resumed crawl fetches it again.
                emergency_stop("embedding backend failure: " + outcome.error);
            } else {
                frontier_->mark_complete(url);
            }
        } else {
            ++s.processed;
            if (outcome.relevant) ++s.relevant;
            frontier_->mark_complete(url);
        }
        --s.pending;
        monitor_.report(id, WorkerState::Idle);
    }
    monitor_.report(id, WorkerState::Stopped);
}

CrawlReport Crawler::run(const std::vector<std::string>& seeds) {
    auto started = std::chrono::steady_clock::now();
    auto& s = *impl_;

    for (const auto& row : store_->rows()) {
        if (!row.processed) continue;
        ++s.processed;
        if (row.relevant) ++s.relevant;
    }
    std::size_t previously_processed = s.processed.load();
    s.reserved = s.processed.load();
    s.pending = static_cast<long>(frontier_->queued());

    for (const auto& seed : seeds) {
        UrlTask task;
        task.url = seed;
        auto status = frontier_->offer(std::move(task));
        if (status == EnqueueStatus::Accepted) ++s.pending;
        else if (status == EnqueueStatus::Malformed) log_warn("ignoring malformed seed " + seed);
    }

    std::vector<std::thread> threads;
    s.retrievers_alive = config_.retriever_workers;
    for (int i = 0; i < config_.retriever_workers; ++i) {
        int id = monitor_.register_worker(WorkerRole::Retriever);
        threads.emplace_back([this, id] { retriever_loop(id); });
    }
    for (int i = 0; i < config_.extractor_workers; ++i) {
        int id = monitor_.register_worker(WorkerRole::Extractor);
        threads.emplace_back([this, id] { extractor_loop(id); });
    }
    for (auto& t : threads) t.join();

    CrawlReport report;
    auto rows = store_->rows();
    report.processed = s.processed.load();
    report.relevant = s.relevant.load();
    report.fetched = s.fetched.load();
    report.skipped = s.skipped.load();
    report.errored = s.errored.load();
    report.requests = s.requests.load();
    if (report.processed > 0) report.harvest_rate = harvest_rate(rows);
    report.frontier_remaining = frontier_->queued();
    report.stopped = monitor_.stop_requested();
    report.stop_reason = s.stop_reason;
    report.skip_counts = s.skip_counts;
    report.ranked = rank_documents(rows);

    const auto& out = config_.output_dir;
    write_text(out / "ranked.csv", ranked_csv(report.ranked));
    report.graph = export_multigraph(rows, out / "graph.dot", out / "graph.graphml");
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json j = {{"processed", report.processed},
              {"previously_processed", previously_processed},
              {"relevant", report.relevant},
              {"harvest_rate", report.harvest_rate ? json(*report.harvest_rate) : json(nullptr)},
              {"fetched", report.fetched},
              {"skipped", report.skipped},
              {"errored", report.errored},
              {"requests", report.requests},
              {"frontier_remaining", report.frontier_remaining},
              {"runtime_s", report.runtime_s},
              {"stopped", report.stopped},
              {"stop_reason", report.stop_reason},
              {"skip_counts", report.skip_counts},
              {"graph", {{"nodes", report.graph.nodes}, {"edges", report.graph.edges},
                         {"components", report.graph.components}}}};
    write_text(out / "report.json", j.dump(2) + "\n");
    return report;
}

Model load_model_for(const fs::path& path, const EmbeddingBackend& backend) {
    Model model;
    try {
        model = load_model(path);
    } catch (const std::exception& e) {
        throw ConfigError("cannot load model " + path.string() + ": " + e.what());
    }
    if (model.backend_name != backend.name() || model.dimension != backend.dimension()) {
        throw ConfigError("model " + path.string() + " was trained with backend '" + model.backend_name + "' (D=" +
                          std::to_string(model.dimension) + "), but the configured backend is '" + backend.name() +
                          "' (D=" + std::to_string(backend.dimension()) + ")");
    }
    return model;
}

CrawlReport run_crawl(const CrawlConfig& config) {
    config.validate();
    auto seeds = load_seeds(config.seed_file);
    if (seeds.empty()) throw ConfigError("seed file " + config.seed_file.string() + " is empty");
    auto backend = make_backend(config.backend, config.sidecar_model);
    auto model = load_model_for(config.model_file, *backend);
    Blacklist blacklist = config.blacklist_file ? Blacklist::from_file(*config.blacklist_file) : Blacklist::defaults();
    CurlHttpClient client;
    Crawler crawler(config, model.truths, *backend, std::move(blacklist), client);
    return crawler.run(seeds);
}

}  // namespace threatcrawl
