#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace threatcrawl {

// Decodes named (the common subset) and numeric character references.
std::string decode_entities(std::string_view text);

// Forgiving HTML tree: tag soup in, element/text nodes out. Never throws.
class HtmlDocument {
public:
    using NodeId = std::size_t;
    static constexpr NodeId kRoot = 0;

    struct Node {
        bool is_text = false;
        std::string tag;   // lowercase; empty for text and the root
        std::string text;  // decoded, for text nodes
        std::vector<std::pair<std::string, std::string>> attrs;
        std::vector<NodeId> children;
        NodeId parent = kRoot;
    };

    static HtmlDocument parse(std::string_view html);

    const Node& node(NodeId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    std::optional<std::string> attr(NodeId id, std::string_view name) const;
    // Concatenated descendant text, unnormalized.
    std::string text_content(NodeId id) const;
    std::vector<NodeId> elements_by_tag(std::string_view tag) const;

private:
    NodeId add(Node n);
    std::vector<Node> nodes_;
};

struct MainContentOptions {
    // Blocks whose share of link text exceeds this are dropped.
    double max_link_density = 0.5;
    // Non-heading blocks with fewer words are dropped, unless no block on
    // the page reaches this size.
    int min_block_words = 5;
};

// Boilerplate-stripped plain text; paragraphs separated by blank lines.
std::string extract_main_content(std::string_view html, const MainContentOptions& options = {});
std::string extract_main_content(const HtmlDocument& doc, const MainContentOptions& options = {});

struct AnchorLink {
    std::string href;
    std::string rel;  // lowercase, may be empty
    std::string anchor_text;
};

std::vector<AnchorLink> collect_anchors(const HtmlDocument& doc);

// True when a robots meta tag (name "robots" or `agent_token`) says
// nofollow or none.
bool meta_nofollow(const HtmlDocument& doc, std::string_view agent_token);

std::optional<std::string> base_href(const HtmlDocument& doc);

}  // namespace threatcrawl
