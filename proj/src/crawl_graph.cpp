#include "threatcrawl/crawl_graph.hpp"

#include <fstream>
#include <iomanip>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace threatcrawl {

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::optional<std::size_t> CrawlGraph::index_of(const std::string& url) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].url == url) return i;
    }
    return std::nullopt;
}

CrawlGraph build_crawl_graph(std::span<const IndexRow> rows) {
    CrawlGraph g;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        if (!r.processed || index.count(r.url)) continue;
        index.emplace(r.url, g.nodes.size());
        GraphNode n;
        n.url = r.url;
        n.relevant = r.relevant;
        n.label = r.label;
        if (r.relevant) n.rank_key = r.relative_distance;
        g.nodes.push_back(std::move(n));
    }
    for (const auto& r : rows) {
        if (!r.processed) continue;
        auto from = index.at(r.url);
        for (const auto& link : r.links) {
            auto it = index.find(link);
            if (it != index.end()) g.edges.push_back({from, it->second});
        }
    }
    return g;
}

std::size_t weakly_connected_components(const CrawlGraph& graph) {
    std::vector<std::vector<std::size_t>> adj(graph.nodes.size());
    for (const auto& e : graph.edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    std::vector<bool> visited(graph.nodes.size(), false);
    std::size_t components = 0;
    for (std::size_t start = 0; start < graph.nodes.size(); ++start) {
        if (visited[start]) continue;
        ++components;
        std::queue<std::size_t> q;
        q.push(start);
        visited[start] = true;
        while (!q.empty()) {
            auto v = q.front();
            q.pop();
            for (auto w : adj[v]) {
                if (!visited[w]) {
                    visited[w] = true;
                    q.push(w);
                }
            }
        }
    }
    return components;
}

std::string to_dot(const CrawlGraph& graph) {
    std::ostringstream out;
    out << "digraph crawl {\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& n = graph.nodes[i];
        out << "  n" << i << " [url=\"" << dot_escape(n.url) << "\", relevant=" << (n.relevant ? "true" : "false")
            << ", label=\"" << dot_escape(n.label.value_or("")) << "\"";
        if (n.rank_key) out << ", rank_key=" << format_double(*n.rank_key);
        out << "];\n";
    }
    for (const auto& e : graph.edges) out << "  n" << e.from << " -> n" << e.to << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_graphml(const CrawlGraph& graph) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"url\" for=\"node\" attr.name=\"url\" attr.type=\"string\"/>\n"
        << "  <key id=\"relevant\" for=\"node\" attr.name=\"relevant\" attr.type=\"boolean\"/>\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"rank_key\" for=\"node\" attr.name=\"rank_key\" attr.type=\"double\"/>\n"
        << "  <graph id=\"crawl\" edgedefault=\"directed\">\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& n = graph.nodes[i];
        out << "    <node id=\"n" << i << "\">"
            << "<data key=\"url\">" << xml_escape(n.url) << "</data>"
            << "<data key=\"relevant\">" << (n.relevant ? "true" : "false") << "</data>"
            << "<data key=\"label\">" << xml_escape(n.label.value_or("")) << "</data>";
        if (n.rank_key) out << "<data key=\"rank_key\">" << format_double(*n.rank_key) << "</data>";
        out << "</node>\n";
    }
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        out << "    <edge id=\"e" << i << "\" source=\"n" << graph.edges[i].from << "\" target=\"n"
            << graph.edges[i].to << "\"/>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

GraphExportSummary export_multigraph(std::span<const IndexRow> rows, const std::filesystem::path& dot_path,
                                     const std::optional<std::filesystem::path>& graphml_path) {
    auto graph = build_crawl_graph(rows);
    write_file(dot_path, to_dot(graph));
    if (graphml_path) write_file(*graphml_path, to_graphml(graph));
    return {graph.nodes.size(), graph.edges.size(), weakly_connected_components(graph)};
}

}  // namespace threatcrawl
