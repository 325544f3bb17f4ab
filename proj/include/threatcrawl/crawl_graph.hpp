#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threatcrawl/document_store.hpp"

namespace threatcrawl {

struct GraphNode {
    std::string url;
    bool relevant = false;
    std::optional<std::string> label;
    std::optional<double> rank_key;
};

struct GraphEdge {
    std::size_t from = 0;
    std::size_t to = 0;
};

// Directed multigraph of processed documents. One edge per stored
// reference whose target was also processed; parallel edges are kept.
struct CrawlGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    std::optional<std::size_t> index_of(const std::string& url) const;
};

CrawlGraph build_crawl_graph(std::span<const IndexRow> rows);

// Components of the underlying undirected graph.
std::size_t weakly_connected_components(const CrawlGraph& graph);

std::string to_dot(const CrawlGraph& graph);
std::string to_graphml(const CrawlGraph& graph);

struct GraphExportSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t components = 0;
};

GraphExportSummary export_multigraph(std::span<const IndexRow> rows, const std::filesystem::path& dot_path,
                                     const std::optional<std::filesystem::path>& graphml_path = std::nullopt);

}  // namespace threatcrawl
