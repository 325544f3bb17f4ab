// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "fixture_server.hpp"
#include "fixture_web.hpp"
#include "oracles.hpp"
#include "random_corpus.hpp"
#include "table_backend.hpp"
#include "threatcrawl/crawler.hpp"
#include "threatcrawl/evaluator.hpp"
#include "threatcrawl/log.hpp"
#include "threatcrawl/mock_backend.hpp"

using namespace threatcrawl;
using namespace threatcrawl::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("tc-acceptance-" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

GroundTruthMap fixture_model(const FixtureWeb& web, const EmbeddingBackend& backend) {
    TrainingOptions options;
    options.train_relevant_vector = true;
    return train_ground_truth(web.training, backend, options);
}

struct CrawlRun {
    CrawlReport report;
    std::set<std::string> processed;  // targets
    fs::path dir;
};

CrawlRun crawl_fixture(const FixtureWeb& web, FixtureServer& server, const GroundTruthMap& truths,
                       const EmbeddingBackend& backend, const std::string& name, bool baseline) {
    CrawlRun run;
    run.dir = scratch(name);
    CrawlConfig config;
    config.output_dir = run.dir;
    config.default_delay_s = 0.0;
    config.timeout_s = 10;
    config.retries = 0;
    config.max_pages = 1000;
    if (baseline) {
        config.follow_all_links = true;
        config.shuffle_seed = 1234;
    }
    CurlHttpClient client;
    Crawler crawler(config, truths, backend, Blacklist::defaults(), client);
    run.report = crawler.run({server.url(web.seed_target)});
    const std::string origin = server.origin();
    for (const auto& row : load_index(run.dir / "index.jsonl")) {
        if (row.processed && row.url.rfind(origin, 0) == 0) run.processed.insert(row.url.substr(origin.size()));
    }
    return run;
}

// Criterion: focused crawl harvest vs. shuffled follow-everything baseline.
Outcome harvest_criterion(CrawlRun& focused_out) {
    auto started = Clock::now();
    MockBackend backend(42, 256);
    auto web = make_fixture_web();
    FixtureServer server;
    serve_fixture_web(server, web);
    auto truths = fixture_model(web, backend);

    auto focused = crawl_fixture(web, server, truths, backend, "focused", false);
    auto repeat = crawl_fixture(web, server, truths, backend, "focused-repeat", false);
    auto baseline = crawl_fixture(web, server, truths, backend, "baseline", true);
    double runtime = seconds_since(started);

    double h = focused.report.harvest_rate.value_or(0.0);
    double b = baseline.report.harvest_rate.value_or(1.0);
    bool deterministic = focused.processed == repeat.processed &&
                         focused.report.harvest_rate == repeat.report.harvest_rate;
    auto expected = oracle::simulate_crawl(web.links, web.relevant, {web.seed_target});
    bool matches_simulation = focused.processed == expected;

    Outcome o;
    o.pass = h >= 0.45 && b <= 0.35 && deterministic && runtime < 30.0;
    o.detail = "focused=" + fmt(h) + " (" + std::to_string(focused.report.relevant) + "/" +
               std::to_string(focused.report.processed) + ") baseline=" + fmt(b) + " (" +
               std::to_string(baseline.report.relevant) + "/" + std::to_string(baseline.report.processed) +
               ") deterministic=" + (deterministic ? "yes" : "no") +
               " simulation_match=" + (matches_simulation ? "yes" : "no") + " runtime=" + fmt(runtime, 1) + "s";
    focused_out = std::move(focused);
    return o;
}

Outcome oracle_equivalence_criterion() {
    auto started = Clock::now();
    MockBackend backend(42, 256);
    int failures = 0;
    std::string first;
    std::map<int, int> label_counts;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto corpus = make_random_corpus(seed * 7919);
        ++label_counts[corpus.label_count];
        if (auto diff = compare_with_oracle(corpus, backend, 1e-9)) {
            if (failures++ == 0) first = "corpus " + std::to_string(seed) + ": " + *diff;
        }
    }
    double runtime = seconds_since(started);
    Outcome o;
    o.pass = failures == 0 && runtime < 60.0;
    o.detail = "50 corpora (3/4/5 labels: " + std::to_string(label_counts[3]) + "/" + std::to_string(label_counts[4]) +
               "/" + std::to_string(label_counts[5]) + "), mismatches=" + std::to_string(failures) +
               (first.empty() ? "" : " first: " + first) + " runtime=" + fmt(runtime, 1) + "s";
    return o;
}

Outcome relative_rule_criterion() {
    TableBackend backend(3);
    backend.set("doc", {std::cos(0.8), std::sin(0.8), 0.0});
    GroundTruthMap truths;
    GroundTruth a;
    a.label = Label::TTPs;
    a.vector = EmbeddingVector{{1, 0, 0}, true};
    a.allowed_distance = 1.0;
    GroundTruth b;
    b.label = Label::MalwareUsed;
    b.vector = EmbeddingVector{{0, 1, 0}, true};
    b.allowed_distance = 0.9;
    truths[a.label] = a;
    truths[b.label] = b;
    std::vector<std::string> doc = {"doc"};
    auto relative = classify(doc, truths, backend);
    auto absolute = classify(doc, truths, backend, AssignmentRule::Absolute);
    const auto* sa = relative.score_for(Label::TTPs);
    const auto* sb = relative.score_for(Label::MalwareUsed);
    bool inside_both = sa && sb && sa->relative_distance <= 1.0 && sb->relative_distance <= 1.0;
    bool closer_to_b = sa && sb && sb->distance < sa->distance;
    Outcome o;
    o.pass = inside_both && closer_to_b && relative.assigned == Label::TTPs && absolute.assigned == Label::MalwareUsed;
    o.detail = "d(A)=" + fmt(sa ? sa->distance : -1) + " d(B)=" + fmt(sb ? sb->distance : -1) +
               " rel(A)=" + fmt(sa ? sa->relative_distance : -1) + " rel(B)=" + fmt(sb ? sb->relative_distance : -1) +
               " relative->" + (relative.assigned ? std::string(label_name(*relative.assigned)) : "none") +
               " absolute->" + (absolute.assigned ? std::string(label_name(*absolute.assigned)) : "none");
    return o;
}

Outcome adaptive_budget_criterion() {
    MockBackend backend(42, 256);
    std::vector<std::string> trace;
    std::string all;
    for (int i = 1; i <= 10; ++i) {
        trace.push_back("w" + std::to_string(i));
        all += (i > 1 ? " " : "") + trace.back();
    }
    trace.push_back(all);
    for (int i = 0; i < 30; ++i) trace.push_back("tail" + std::to_string(i));
    auto doc = embed_document(trace, backend, AdaptiveBudget{0.02, 100});
    bool crosses_at_11 = doc.gradients.size() == 10 && doc.gradients.back() < 0.02 &&
                         std::all_of(doc.gradients.begin(), doc.gradients.end() - 1, [](double g) { return g >= 0.02; });

    int fixed_violations = 0, fixed_cases = 0;
    for (int n : {1, 2, 5, 10, 41, 50, 200}) {
        for (std::size_t len : {1u, 3u, 11u, 41u}) {
            std::vector<std::string> s(trace.begin(), trace.begin() + len);
            ++fixed_cases;
            if (embed_document(s, backend, FixedBudget{n}).sentences_used != std::min<int>(n, len)) ++fixed_violations;
        }
    }
    Outcome o;
    o.pass = doc.sentences_used == 11 && crosses_at_11 && fixed_violations == 0;
    o.detail = "adaptive sentences_used=" + std::to_string(doc.sentences_used) + " gradient@11=" +
               fmt(doc.gradients.empty() ? -1 : doc.gradients.back(), 5) + "; fixed min rule " +
               std::to_string(fixed_cases - fixed_violations) + "/" + std::to_string(fixed_cases);
    return o;
}

Outcome politeness_criterion() {
    auto started = Clock::now();
    const std::string info_url = "https://acceptance.example/crawler-info";
    const std::string robots = "User-agent: *\nCrawl-delay: 2\nDisallow: /private\nDisallow: /*.pdf$\n";
    TextGenerator text(11);

    FixtureServer alpha, beta;
    for (auto* server : {&alpha, &beta}) {
        server->set("/robots.txt", FixtureResponse{200, "text/plain", robots});
        server->set_html("/private/secret.html", render_page("secret", text.offtopic_sentences(0, 10), {}, {}));
        server->set("/report.pdf", FixtureResponse{200, "application/pdf", "%PDF-1.4"});
    }
    alpha.set_html("/index.html",
                   render_page("alpha", text.offtopic_sentences(0, 10),
                               {"/a1.html", "/private/secret.html", "/report.pdf", beta.url("/index.html")}, {}));
    alpha.set_html("/a1.html", render_page("a1", text.offtopic_sentences(1, 10), {"/a2.html", "/private/x"}, {}));
    alpha.set_html("/a2.html", render_page("a2", text.offtopic_sentences(2, 10), {"/index.html"}, {}));
    beta.set_html("/index.html",
                  render_page("beta", text.offtopic_sentences(0, 10), {"/b1.html", "/private/secret.html"}, {}));
    beta.set_html("/b1.html", render_page("b1", text.offtopic_sentences(1, 10), {"/report.pdf"}, {}));

    MockBackend backend(42, 256);
    auto web = make_fixture_web();
    auto truths = fixture_model(web, backend);
    CrawlConfig config;
    config.output_dir = scratch("politeness");
    config.default_delay_s = 5.0;
    config.timeout_s = 10;
    config.retries = 0;
    config.info_url = info_url;
    config.follow_all_links = true;
    config.retriever_workers = 3;
    CurlHttpClient client;
    Crawler crawler(config, truths, backend, Blacklist::defaults(), client);
    auto report = crawler.run({alpha.url("/index.html")});

    // 2 robots.txt fetches plus the 5 allowed pages.
    std::size_t total = 0, disallowed = 0, missing_ua = 0;
    double min_gap = 1e9;
    auto robots_record = parse_robots(robots, "ThreatCrawl-clone", "x", 5.0);
    for (auto* server : {&alpha, &beta}) {
        auto requests = server->requests();
        std::sort(requests.begin(), requests.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
        for (std::size_t i = 0; i < requests.size(); ++i) {
            ++total;
            if (!robots_record.allowed(requests[i].target)) ++disallowed;
            if (requests[i].user_agent.find(info_url) == std::string::npos) ++missing_ua;
            if (i > 0) min_gap = std::min(min_gap, std::chrono::duration<double>(requests[i].at - requests[i - 1].at).count());
        }
    }
    Outcome o;
    o.pass = total == 7 && disallowed == 0 && min_gap >= 2.0 && missing_ua == 0 && report.processed == 5;
    o.detail = std::to_string(total) + " requests over 2 domains, disallowed=" + std::to_string(disallowed) +
               " min_gap=" + fmt(min_gap) + "s ua_missing=" + std::to_string(missing_ua) +
               " processed=" + std::to_string(report.processed) + " runtime=" + fmt(seconds_since(started), 1) + "s";
    return o;
}

Outcome evaluation_criterion() {
    TableBackend backend(5);
    const std::pair<Label, const char*> classes[] = {{Label::TTPs, "ttp"},
                                                     {Label::BroadInformation, "broad"},
                                                     {Label::MalwareUsed, "malware"},
                                                     {Label::VulnerabilityTargeted, "vuln"},
                                                     {Label::NotRelevant, "other"}};
    std::vector<LabeledDocument> docs;
    for (std::size_t c = 0; c < 5; ++c) {
        std::vector<double> axis(5, 0.0);
        axis[c] = 1.0;
        backend.set(classes[c].second, axis);
        for (std::size_t i = 0; i < 8 + 3 * c; ++i) {
            docs.push_back({std::string(classes[c].second) + std::to_string(i), {classes[c].second}, classes[c].first});
        }
    }
    TrainingOptions options;
    options.budget = FixedBudget{1};
    auto report = kfold_evaluate(docs, 5, backend, options);
    bool perfect = report.rows.size() == 5;
    std::string worst;
    for (const auto& row : report.rows) {
        if (row.precision != 1.0 || row.recall != 1.0 || row.f1 != 1.0) {
            perfect = false;
            worst += std::string(label_name(row.label)) + " ";
        }
    }

    std::vector<LabeledDocument> big;
    for (int i = 0; i < 259; ++i) big.push_back({std::to_string(i), {"s"}, classes[i % 5].first});
    std::vector<std::size_t> sizes;
    for (const auto& f : stratified_folds(big, 5)) sizes.push_back(f.size());
    std::multiset<std::size_t> got(sizes.begin(), sizes.end());
    std::multiset<std::size_t> want = {52, 52, 52, 52, 51};

    std::string fold_text;
    for (auto s : sizes) fold_text += (fold_text.empty() ? "" : ",") + std::to_string(s);
    Outcome o;
    o.pass = perfect && got == want;
    o.detail = "separable corpus P=R=F1=1 for " + std::to_string(report.rows.size()) + " rows" +
               (worst.empty() ? "" : " (imperfect: " + worst + ")") + "; 259 docs -> {" + fold_text + "}";
    return o;
}

Outcome multigraph_criterion(const CrawlRun& run) {
    std::ifstream in(run.dir / "graph.dot");
    std::string dot((std::istreambuf_iterator<char>(in)), {});
    std::map<std::string, std::string> id_to_url;
    std::vector<std::pair<std::string, std::string>> dot_edges;
    std::regex node_re(R"(^\s*(n\d+)\s*\[url=\"([^\"]*)\")");
    std::regex edge_re(R"(^\s*(n\d+)\s*->\s*(n\d+))");
    std::istringstream lines(dot);
    std::string line;
    std::smatch m;
    while (std::getline(lines, line)) {
        if (std::regex_search(line, m, edge_re)) {
            dot_edges.push_back({m[1], m[2]});
        } else if (std::regex_search(line, m, node_re)) {
            id_to_url[m[1]] = m[2];
        }
    }

    auto rows = load_index(run.dir / "index.jsonl");
    std::set<std::string> processed;
    for (const auto& r : rows) {
        if (r.processed) processed.insert(r.url);
    }
    std::multiset<std::pair<std::string, std::string>> stored, exported;
    for (const auto& r : rows) {
        if (!r.processed) continue;
        for (const auto& l : r.links) {
            if (processed.count(l)) stored.insert({r.url, l});
        }
    }
    bool ids_ok = true;
    for (const auto& [a, b] : dot_edges) {
        if (!id_to_url.count(a) || !id_to_url.count(b)) {
            ids_ok = false;
            continue;
        }
        exported.insert({id_to_url[a], id_to_url[b]});
    }

    std::map<std::string, std::size_t> index;
    for (const auto& [id, url] : id_to_url) index.emplace(id, index.size());
    std::vector<std::pair<std::size_t, std::size_t>> uf_edges;
    for (const auto& [a, b] : dot_edges) {
        if (index.count(a) && index.count(b)) uf_edges.push_back({index[a], index[b]});
    }
    auto uf = oracle::union_find_components(index.size(), uf_edges);
    std::size_t parallel = 0;
    for (auto it = stored.begin(); it != stored.end(); it = stored.upper_bound(*it)) parallel += stored.count(*it) > 1;

    Outcome o;
    o.pass = ids_ok && !stored.empty() && exported == stored && id_to_url.size() == processed.size() &&
             run.report.graph.components == uf;
    o.detail = std::to_string(id_to_url.size()) + " nodes, " + std::to_string(exported.size()) + " DOT edges vs " +
               std::to_string(stored.size()) + " stored links (" + std::to_string(parallel) +
               " parallel pairs); components reported=" + std::to_string(run.report.graph.components) +
               " union-find=" + std::to_string(uf);
    return o;
}

}  // namespace

int main() {
    log_threshold().store(LogLevel::Error);
    int failed = 0;
    auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    };

    CrawlRun focused;
    report("harvest-rate", [&] { return harvest_criterion(focused); });
    report("classifier-oracle-equivalence", oracle_equivalence_criterion);
    report("relative-distance-rule", relative_rule_criterion);
    report("adaptive-budget", adaptive_budget_criterion);
    report("politeness", politeness_criterion);
    report("evaluation-harness", evaluation_criterion);
    report("multigraph", [&] {
        if (focused.dir.empty()) return Outcome{false, "no fixture crawl output"};
        return multigraph_criterion(focused);
    });

    fs::remove_all(fs::temp_directory_path() / ("tc-acceptance-" + std::to_string(::getpid())));
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
