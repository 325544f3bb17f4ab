#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "threatcrawl/classifier.hpp"
#include "threatcrawl/config.hpp"
#include "threatcrawl/corpus.hpp"
#include "threatcrawl/crawl_graph.hpp"
#include "threatcrawl/crawler.hpp"
#include "threatcrawl/evaluator.hpp"
#include "threatcrawl/log.hpp"

namespace fs = std::filesystem;
using namespace threatcrawl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

struct TrainArgs {
    fs::path corpus;
    fs::path out = "model.json";
    std::string backend = "mock:42";
    std::string sidecar_model = "bert-base-uncased";
    std::string budget = "adaptive:0.02";
    std::string distance_mode = "max";
    bool relevant_vector = false;
    int k = 5;
    fs::path csv;
    std::string name;
};

TrainingOptions training_options(const TrainArgs& a) {
    TrainingOptions t;
    t.budget = parse_budget(a.budget);
    auto mode = parse_distance_mode(a.distance_mode);
    if (!mode) throw ConfigError("distance mode must be max or average");
    t.distance_mode = *mode;
    t.train_relevant_vector = a.relevant_vector;
    return t;
}

int cmd_train(const TrainArgs& a) {
    auto options = training_options(a);
    auto docs = corpus_documents(load_corpus(a.corpus));
    auto backend = make_backend(a.backend, a.sidecar_model);
    Model model;
    model.backend_name = backend->name();
    model.dimension = backend->dimension();
    model.distance_mode = options.distance_mode;
    model.truths = train_ground_truth(docs, *backend, options);
    save_model(model, a.out);
    std::cout << "trained " << model.truths.size() << " labels from " << docs.size() << " documents -> "
              << a.out.string() << '\n';
    for (const auto& [label, gt] : model.truths) {
        std::cout << "  " << label_name(label) << ": allowed_distance=" << gt.allowed_distance
                  << " sentence_budget=" << gt.sentence_budget << '\n';
    }
    return 0;
}

int cmd_evaluate(const TrainArgs& a) {
    auto options = training_options(a);
    auto docs = corpus_documents(load_corpus(a.corpus));
    auto backend = make_backend(a.backend, a.sidecar_model);
    auto report = kfold_evaluate(docs, a.k, *backend, options);
    std::string name = a.name.empty() ? budget_to_string(options.budget) + "/" +
                                            std::string(distance_mode_name(options.distance_mode))
                                      : a.name;
    std::cout << metrics_table(report, name);
    for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        out << metrics_csv(report, name);
    }
    return 0;
}

int cmd_crawl(CrawlConfig config) {
    config.validate();
    auto seeds = load_seeds(config.seed_file);
    if (seeds.empty()) throw ConfigError("seed file " + config.seed_file.string() + " is empty");
    auto backend = make_backend(config.backend, config.sidecar_model);
    auto model = load_model_for(config.model_file, *backend);
    Blacklist blacklist = config.blacklist_file ? Blacklist::from_file(*config.blacklist_file) : Blacklist::defaults();
    CurlHttpClient client;
    Crawler crawler(config, model.truths, *backend, std::move(blacklist), client);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
        while (!done.load()) {
            if (g_interrupted.load()) {
                crawler.emergency_stop("interrupted");
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    });
    CrawlReport report;
    try {
        report = crawler.run(seeds);
    } catch (...) {
        done = true;
        watcher.join();
        throw;
    }
    done = true;
    watcher.join();

    std::cout << report_summary(report);
    std::size_t shown = std::min<std::size_t>(report.ranked.size(), 10);
    if (shown > 0) std::cout << "top " << shown << " relevant:\n";
    for (std::size_t i = 0; i < shown; ++i) {
        std::cout << "  " << i + 1 << ". " << report.ranked[i].url << " [" << report.ranked[i].label << "] "
                  << report.ranked[i].rank_key << '\n';
    }
    return 0;
}

int cmd_graph(const fs::path& dir, const fs::path& dot, const fs::path& graphml) {
    auto rows = load_index(dir / "index.jsonl");
    auto summary = export_multigraph(rows, dot.empty() ? dir / "graph.dot" : dot,
                                     graphml.empty() ? std::nullopt : std::optional<fs::path>(graphml));
    std::cout << summary.nodes << " nodes, " << summary.edges << " edges, " << summary.components
              << " weakly connected components\n";
    return 0;
}

int cmd_report(const fs::path& dir, std::size_t top) {
    if (!fs::exists(dir / "index.jsonl")) throw ConfigError("no index.jsonl in " + dir.string());
    auto rows = load_index(dir / "index.jsonl");
    std::size_t processed = 0, relevant = 0;
    for (const auto& r : rows) {
        processed += r.processed;
        relevant += r.processed && r.relevant;
    }
    std::cout << "processed: " << processed << "\nrelevant:  " << relevant << '\n';
    if (processed > 0) std::cout << "harvest:   " << harvest_rate(rows) << '\n';
    auto ranked = rank_documents(rows);
    for (std::size_t i = 0; i < std::min(top, ranked.size()); ++i) {
        std::cout << "  " << i + 1 << ". " << ranked[i].url << " [" << ranked[i].label << "] " << ranked[i].rank_key
                  << '\n';
    }
    return 0;
}

void add_training_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--corpus", a.corpus, "Labeled corpus directory")->required();
    cmd->add_option("--backend", a.backend, "mock[:seed[:dim]] or sidecar:<url>");
    cmd->add_option("--sidecar-model", a.sidecar_model, "Model id requested from the sidecar");
    cmd->add_option("--budget", a.budget, "fixed:<n> or adaptive:<limit>[:<cap>]");
    cmd->add_option("--distance-mode", a.distance_mode, "max or average");
    cmd->add_flag("--relevant-vector", a.relevant_vector, "Also train an aggregate Relevant vector");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Focused crawler for cyber threat intelligence"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train label ground truths from a corpus");
    add_training_flags(train, train_args);
    train->add_option("--out", train_args.out, "Model file to write");

    TrainArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "K-fold cross-validation on a corpus");
    add_training_flags(evaluate, eval_args);
    evaluate->add_option("-k,--folds", eval_args.k, "Number of folds")->check(CLI::Range(2, 1000));
    evaluate->add_option("--csv", eval_args.csv, "Write metrics CSV here");
    evaluate->add_option("--name", eval_args.name, "Configuration name in the report");

    CrawlConfig config;
    fs::path config_file;
    std::map<std::string, std::string> overrides;
    auto* crawl = app.add_subcommand("crawl", "Run a focused crawl");
    crawl->add_option("--config", config_file, "key = value config file");
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        crawl->add_option_function<std::string>(
            name, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    flag("--seeds", "seed_file", "Seed URL file");
    flag("--blacklist", "blacklist_file", "Blacklisted domains file");
    flag("--model", "model_file", "Trained model file");
    flag("--backend", "backend", "mock[:seed[:dim]] or sidecar:<url>");
    flag("--sidecar-model", "sidecar_model", "Model id requested from the sidecar");
    flag("--retrievers", "retriever_workers", "Retriever worker count");
    flag("--extractors", "extractor_workers", "Extractor worker count");
    flag("--default-delay", "default_delay_s", "Crawl delay when robots.txt declares none (s)");
    flag("--timeout", "timeout_s", "Request timeout (s)");
    flag("--max-pages", "max_pages", "Stop after this many processed documents");
    flag("--distance-mode", "distance_mode", "max or average");
    flag("--budget", "budget", "fixed:<n> or adaptive:<limit>[:<cap>]");
    flag("--output-dir", "output_dir", "Output directory");
    flag("--info-url", "info_url", "URL advertised in the User-Agent");
    flag("--shuffle-seed", "shuffle_seed", "Shuffle each page's links with this seed");
    flag("--resume", "resume", "Resume from output_dir (true/false)");
    crawl->add_flag_callback("--follow-all-links", [&] { overrides["follow_all_links"] = "true"; },
                             "Baseline mode: follow links of every document");

    fs::path graph_dir, dot_path, graphml_path;
    auto* graph = app.add_subcommand("graph", "Export the crawl multigraph");
    graph->add_option("--output-dir", graph_dir, "Crawl output directory")->required();
    graph->add_option("--dot", dot_path, "DOT file (default <output-dir>/graph.dot)");
    graph->add_option("--graphml", graphml_path, "Also write GraphML here");

    fs::path report_dir;
    std::size_t top = 20;
    auto* report = app.add_subcommand("report", "Summarize a crawl output directory");
    report->add_option("--output-dir", report_dir, "Crawl output directory")->required();
    report->add_option("--top", top, "Ranked documents to list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    if (verbose) log_threshold().store(LogLevel::Info);

    try {
        if (*train) return cmd_train(train_args);
        if (*evaluate) return cmd_evaluate(eval_args);
        if (*crawl) {
            if (!config_file.empty()) config = load_config_file(config_file, config);
            for (const auto& [k, v] : overrides) apply_setting(config, k, v);
            return cmd_crawl(config);
        }
        if (*graph) return cmd_graph(graph_dir, dot_path, graphml_path);
        if (*report) return cmd_report(report_dir, top);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CorpusError& e) {
        std::cerr << "corpus error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
