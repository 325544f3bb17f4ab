#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "threatcrawl/crawl_graph.hpp"

using namespace threatcrawl;

namespace {

IndexRow node(const std::string& url, std::vector<std::string> links = {}, bool relevant = false) {
    IndexRow r;
    r.url = url;
    r.processed = true;
    r.relevant = relevant;
    if (relevant) {
        r.label = "TTPs";
        r.relative_distance = 0.5;
    }
    r.links = std::move(links);
    return r;
}

std::multiset<std::pair<std::string, std::string>> dot_edges(const std::string& dot,
                                                             const std::map<std::string, std::string>& id_to_url) {
    std::multiset<std::pair<std::string, std::string>> out;
    std::regex edge(R"(\s*(n\d+)\s*->\s*(n\d+))");
    std::istringstream in(dot);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (std::regex_search(line, m, edge)) out.insert({id_to_url.at(m[1]), id_to_url.at(m[2])});
    }
    return out;
}

std::map<std::string, std::string> dot_nodes(const std::string& dot) {
    std::map<std::string, std::string> out;
    std::regex n(R"(^\s*(n\d+)\s*\[url=\"([^\"]*)\")");
    std::istringstream in(dot);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (std::regex_search(line, m, n)) out[m[1]] = m[2];
    }
    return out;
}

}  // namespace

TEST(Graph, ParallelEdgesKept) {
    std::vector<IndexRow> rows = {node("A", {"B", "B"}, true), node("B")};
    auto g = build_crawl_graph(rows);
    ASSERT_EQ(g.nodes.size(), 2u);
    ASSERT_EQ(g.edges.size(), 2u);
    for (const auto& e : g.edges) {
        EXPECT_EQ(g.nodes[e.from].url, "A");
        EXPECT_EQ(g.nodes[e.to].url, "B");
    }
    auto dot = to_dot(g);
    auto ids = dot_nodes(dot);
    auto edges = dot_edges(dot, ids);
    EXPECT_EQ(edges.count({"A", "B"}), 2u);
}

TEST(Graph, EdgesOnlyToProcessedDocuments) {
    IndexRow fetched_only;
    fetched_only.url = "C";
    std::vector<IndexRow> rows = {node("A", {"B", "C", "D"}, true), node("B"), fetched_only};
    auto g = build_crawl_graph(rows);
    EXPECT_EQ(g.nodes.size(), 2u);
    EXPECT_EQ(g.edges.size(), 1u);
}

TEST(Graph, SeedsWithoutLinksAreIsolated) {
    std::vector<IndexRow> rows;
    for (int i = 0; i < 7; ++i) rows.push_back(node("s" + std::to_string(i)));
    auto g = build_crawl_graph(rows);
    EXPECT_EQ(g.edges.size(), 0u);
    EXPECT_EQ(weakly_connected_components(g), 7u);
}

TEST(Graph, ThreeClustersMatchUnionFind) {
    std::vector<IndexRow> rows = {node("a1", {"a2"}, true), node("a2", {"a3"}, true), node("a3", {"a1"}, true),
                                  node("b1", {"b2", "b2"}, true), node("b2"), node("c1", {}, true),
                                  node("c2", {"c1"}, true)};
    auto g = build_crawl_graph(rows);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : g.edges) edges.push_back({e.from, e.to});
    EXPECT_EQ(weakly_connected_components(g), 3u);
    EXPECT_EQ(oracle::union_find_components(g.nodes.size(), edges), 3u);
}

TEST(Graph, RandomGraphsMatchUnionFindAndStoredLinks) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + rng() % 40;
        std::vector<IndexRow> rows;
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> links;
            int k = rng() % 4;
            for (int j = 0; j < k; ++j) links.push_back("u" + std::to_string(rng() % (n + 5)));
            rows.push_back(node("u" + std::to_string(i), links, rng() % 2));
        }
        auto g = build_crawl_graph(rows);
        std::multiset<std::pair<std::string, std::string>> stored;
        std::set<std::string> processed;
        for (const auto& r : rows) processed.insert(r.url);
        for (const auto& r : rows) {
            for (const auto& l : r.links) {
                if (processed.count(l)) stored.insert({r.url, l});
            }
        }
        auto dot = to_dot(g);
        EXPECT_EQ(dot_edges(dot, dot_nodes(dot)), stored);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const auto& e : g.edges) edges.push_back({e.from, e.to});
        EXPECT_EQ(weakly_connected_components(g), oracle::union_find_components(g.nodes.size(), edges));
    }
}

TEST(Graph, DotCarriesNodeAttributesAndEscapes) {
    std::vector<IndexRow> rows = {node("https://a.com/q?x=\"1\"", {}, true), node("https://b.com/")};
    auto dot = to_dot(build_crawl_graph(rows));
    EXPECT_EQ(dot.rfind("digraph crawl", 0), 0u);
    EXPECT_NE(dot.find("relevant=true"), std::string::npos);
    EXPECT_NE(dot.find("label=\"TTPs\""), std::string::npos);
    EXPECT_NE(dot.find("rank_key="), std::string::npos);
    EXPECT_NE(dot.find("\\\"1\\\""), std::string::npos);
}

TEST(Graph, ExportWritesFiles) {
    auto dir = std::filesystem::temp_directory_path() / ("tc-graph-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::vector<IndexRow> rows = {node("A", {"B", "B"}, true), node("B"), node("C")};
    auto summary = export_multigraph(rows, dir / "g.dot", dir / "g.graphml");
    EXPECT_EQ(summary.nodes, 3u);
    EXPECT_EQ(summary.edges, 2u);
    EXPECT_EQ(summary.components, 2u);
    std::ifstream gml(dir / "g.graphml");
    std::string text((std::istreambuf_iterator<char>(gml)), {});
    EXPECT_NE(text.find("<graphml"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n') > 0, true);
    std::filesystem::remove_all(dir);
}
