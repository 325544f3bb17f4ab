#include "threatcrawl/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_set>

namespace threatcrawl {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
            return false;
        }
    }
    return true;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

struct NamedEntity {
    std::string_view name;
    std::uint32_t cp;
};

constexpr std::array<NamedEntity, 24> kEntities = {{
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
    {"nbsp", 0xA0},    {"copy", 0xA9},    {"reg", 0xAE},     {"trade", 0x2122}, {"hellip", 0x2026},
    {"mdash", 0x2014}, {"ndash", 0x2013}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"laquo", 0xAB},   {"raquo", 0xBB},   {"middot", 0xB7},  {"bull", 0x2022},
    {"euro", 0x20AC},  {"pound", 0xA3},   {"times", 0xD7},   {"shy", 0xAD},
}};

const std::unordered_set<std::string_view> kVoidTags = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kRawTextTags = {"script", "style", "textarea", "title", "noscript",
                                                          "template", "xmp"};

const std::unordered_set<std::string_view> kBlockTags = {
    "html",   "body",    "main",   "article", "section", "div",     "p",       "li",      "ul",
    "ol",     "dl",      "dt",     "dd",      "h1",      "h2",      "h3",      "h4",      "h5",
    "h6",     "table",   "thead",  "tbody",   "tfoot",   "tr",      "td",      "th",      "blockquote",
    "pre",    "figure",  "figcaption", "caption", "address", "center", "details", "summary", "header",
    "footer", "hr",      "br",     "fieldset", "legend"};

const std::unordered_set<std::string_view> kHeadingTags = {"h1", "h2", "h3", "h4", "h5", "h6"};

// Always dropped from main content.
const std::unordered_set<std::string_view> kChromeTags = {
    "script", "style", "noscript", "nav",    "aside",  "form",   "iframe", "svg", "template",
    "button", "select", "head",    "title",  "canvas", "object", "embed",  "menu", "dialog"};

// class/id tokens that mark navigation and page furniture.
constexpr std::array<std::string_view, 14> kChromeMarkers = {
    "nav",    "navbar", "navigation", "menu",   "footer", "sidebar", "breadcrumb",
    "breadcrumbs", "cookie", "cookies", "share", "social", "advert",  "banner"};

// Start tags that implicitly close an open <p>.
const std::unordered_set<std::string_view> kClosesParagraph = {
    "p",  "div", "ul", "ol", "dl", "table", "h1", "h2", "h3", "h4", "h5", "h6", "blockquote",
    "pre", "section", "article", "aside", "header", "footer", "nav", "main", "figure", "hr", "form", "address"};

}  // namespace

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c != '&') {
            out += c;
            ++i;
            continue;
        }
        auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += c;
            ++i;
            continue;
        }
        std::string_view ref = text.substr(i + 1, semi - i - 1);
        bool done = false;
        if (!ref.empty() && ref.front() == '#') {
            std::uint32_t cp = 0;
            std::string_view digits = ref.substr(1);
            int base = 10;
            if (!digits.empty() && (digits.front() == 'x' || digits.front() == 'X')) {
                base = 16;
                digits.remove_prefix(1);
            }
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
            if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
                append_utf8(out, cp);
                done = true;
            }
        } else {
            for (const auto& e : kEntities) {
                if (e.name == ref) {
                    append_utf8(out, e.cp);
                    done = true;
                    break;
                }
            }
        }
        if (done) {
            i = semi + 1;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

HtmlDocument::NodeId HtmlDocument::add(Node n) {
    NodeId id = nodes_.size();
    nodes_[n.parent].children.push_back(id);
    nodes_.push_back(std::move(n));
    return id;
}

HtmlDocument HtmlDocument::parse(std::string_view html) {
    HtmlDocument doc;
    doc.nodes_.push_back(Node{});
    std::vector<NodeId> open = {kRoot};
    auto current = [&] { return open.back(); };
    auto current_tag = [&]() -> const std::string& { return doc.nodes_[current()].tag; };

    auto add_text = [&](std::string_view raw) {
        if (raw.empty()) return;
        Node n;
        n.is_text = true;
        n.text = decode_entities(raw);
        n.parent = current();
        doc.add(std::move(n));
    };
    auto close_to = [&](std::string_view tag) {
        for (std::size_t k = open.size(); k-- > 1;) {
            if (doc.nodes_[open[k]].tag == tag) {
                open.resize(k);
                return true;
            }
        }
        return false;
    };
    auto in_scope = [&](std::string_view tag, std::initializer_list<std::string_view> barriers) {
        for (std::size_t k = open.size(); k-- > 1;) {
            const auto& t = doc.nodes_[open[k]].tag;
            if (t == tag) return true;
            if (std::find(barriers.begin(), barriers.end(), t) != barriers.end()) return false;
        }
        return false;
    };

    std::size_t i = 0;
    std::size_t text_start = 0;
    const std::size_t n = html.size();
    while (i < n) {
        if (html[i] != '<') {
            ++i;
            continue;
        }
        // Comments, doctype, processing instructions.
        if (html.substr(i, 4) == "<!--") {
            add_text(html.substr(text_start, i - text_start));
            auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? n : end + 3;
            text_start = i;
            continue;
        }
        if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
            add_text(html.substr(text_start, i - text_start));
            auto end = html.find('>', i + 2);
            i = end == std::string_view::npos ? n : end + 1;
            text_start = i;
            continue;
        }

        bool closing = i + 1 < n && html[i + 1] == '/';
        std::size_t name_start = i + (closing ? 2 : 1);
        std::size_t j = name_start;
        if (j >= n || !std::isalpha(static_cast<unsigned char>(html[j]))) {
            ++i;  // a literal '<'
            continue;
        }
        while (j < n && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-' || html[j] == ':')) ++j;
        std::string tag = lower(html.substr(name_start, j - name_start));

        add_text(html.substr(text_start, i - text_start));

        // Attributes.
        std::vector<std::pair<std::string, std::string>> attrs;
        bool self_closing = false;
        while (j < n && html[j] != '>') {
            if (is_space(html[j])) {
                ++j;
                continue;
            }
            if (html[j] == '/') {
                self_closing = true;
                ++j;
                continue;
            }
            std::size_t an = j;
            while (j < n && !is_space(html[j]) && html[j] != '=' && html[j] != '>' && html[j] != '/') ++j;
            std::string name = lower(html.substr(an, j - an));
            while (j < n && is_space(html[j])) ++j;
            std::string value;
            if (j < n && html[j] == '=') {
                ++j;
                while (j < n && is_space(html[j])) ++j;
                if (j < n && (html[j] == '"' || html[j] == '\'')) {
                    char q = html[j++];
                    std::size_t vs = j;
                    while (j < n && html[j] != q) ++j;
                    value = decode_entities(html.substr(vs, j - vs));
                    if (j < n) ++j;
                } else {
                    std::size_t vs = j;
                    while (j < n && !is_space(html[j]) && html[j] != '>') ++j;
                    value = decode_entities(html.substr(vs, j - vs));
                }
            }
            if (!name.empty()) {
                self_closing = false;
                attrs.emplace_back(std::move(name), std::move(value));
            }
        }
        i = j < n ? j + 1 : n;
        text_start = i;

        if (closing) {
            if (tag == "p" && !in_scope("p", {"div", "td", "li", "article", "section", "body"})) {
                continue;  // stray </p>
            }
            close_to(tag);
            continue;
        }

        // Implicit end tags.
        if (kClosesParagraph.count(tag) && in_scope("p", {"div", "td", "li", "article", "section", "body", "blockquote"})) {
            close_to("p");
        }
        if (tag == "li" && in_scope("li", {"ul", "ol"})) close_to("li");
        if ((tag == "dt" || tag == "dd") && (in_scope("dt", {"dl"}) || in_scope("dd", {"dl"}))) {
            if (!close_to("dd")) close_to("dt");
        }
        if ((tag == "td" || tag == "th") && (in_scope("td", {"tr", "table"}) || in_scope("th", {"tr", "table"}))) {
            if (!close_to("td")) close_to("th");
        }
        if (tag == "tr" && in_scope("tr", {"table"})) close_to("tr");
        if (tag == "option" && current_tag() == "option") open.pop_back();

        Node el;
        el.tag = tag;
        el.attrs = std::move(attrs);
        el.parent = current();
        NodeId id = doc.add(std::move(el));

        if (kRawTextTags.count(tag) && !self_closing) {
            // Content runs to the matching end tag, uninterpreted.
            std::size_t k = i;
            std::size_t end = n;
            while (k < n) {
                auto lt = html.find("</", k);
                if (lt == std::string_view::npos) break;
                if (istarts_with(html.substr(lt + 2), tag)) {
                    end = lt;
                    break;
                }
                k = lt + 2;
            }
            std::string_view body = html.substr(i, end - i);
            if (!body.empty()) {
                Node t;
                t.is_text = true;
                t.text = (tag == "title" || tag == "textarea") ? decode_entities(body) : std::string(body);
                t.parent = id;
                doc.add(std::move(t));
            }
            auto gt = end < n ? html.find('>', end) : std::string_view::npos;
            i = gt == std::string_view::npos ? n : gt + 1;
            text_start = i;
            continue;
        }
        if (!self_closing && !kVoidTags.count(tag)) open.push_back(id);
    }
    add_text(html.substr(text_start, n - text_start));
    return doc;
}

std::optional<std::string> HtmlDocument::attr(NodeId id, std::string_view name) const {
    for (const auto& [k, v] : nodes_[id].attrs) {
        if (k == name) return v;
    }
    return std::nullopt;
}

std::string HtmlDocument::text_content(NodeId id) const {
    std::string out;
    std::vector<NodeId> stack = {id};
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        const Node& nd = nodes_[cur];
        if (nd.is_text) {
            out += nd.text;
            continue;
        }
        for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<HtmlDocument::NodeId> HtmlDocument::elements_by_tag(std::string_view tag) const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].is_text && nodes_[id].tag == tag) out.push_back(id);
    }
    return out;
}

namespace {

bool has_chrome_marker(const HtmlDocument& doc, HtmlDocument::NodeId id) {
    for (const char* key : {"class", "id", "role"}) {
        auto value = doc.attr(id, key);
        if (!value) continue;
        std::string v = lower(*value);
        std::size_t pos = 0;
        while (pos < v.size()) {
            auto start = v.find_first_not_of(" \t\n-_", pos);
            if (start == std::string::npos) break;
            auto end = v.find_first_of(" \t\n-_", start);
            std::string_view token = std::string_view(v).substr(start, end == std::string::npos ? v.npos : end - start);
            if (std::find(kChromeMarkers.begin(), kChromeMarkers.end(), token) != kChromeMarkers.end()) return true;
            pos = end == std::string::npos ? v.size() : end;
        }
    }
    return false;
}

struct Segment {
    std::string text;
    std::size_t words = 0;
    std::size_t link_words = 0;
    bool heading = false;
};

std::size_t count_words(std::string_view s) {
    std::size_t words = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words;
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

class SegmentCollector {
public:
    explicit SegmentCollector(const HtmlDocument& doc) : doc_(doc) {}

    std::vector<Segment> run() {
        visit(HtmlDocument::kRoot, false, false, false);
        flush();
        return std::move(segments_);
    }

private:
    void flush() {
        std::string text = collapse_ws(current_.text);
        if (!text.empty()) {
            current_.text = std::move(text);
            current_.words = count_words(current_.text);
            segments_.push_back(std::move(current_));
        }
        current_ = Segment{};
    }

    void visit(HtmlDocument::NodeId id, bool in_link, bool in_heading, bool in_article) {
        const auto& nd = doc_.node(id);
        if (nd.is_text) {
            current_.text += nd.text;
            if (in_link) current_.link_words += count_words(nd.text);
            current_.heading = current_.heading || in_heading;
            return;
        }
        const std::string& tag = nd.tag;
        if (kChromeTags.count(tag)) return;
        if ((tag == "header" && !in_article) || tag == "footer") return;
        if (id != HtmlDocument::kRoot && tag != "body" && tag != "html" && tag != "main" && tag != "article" &&
            has_chrome_marker(doc_, id)) {
            return;
        }

        bool block = kBlockTags.count(tag) > 0;
        if (block) flush();
        bool link = in_link || tag == "a";
        bool heading = in_heading || kHeadingTags.count(tag) > 0;
        bool article = in_article || tag == "article" || tag == "main";
        for (auto child : nd.children) visit(child, link, heading, article);
        if (block) flush();
    }

    const HtmlDocument& doc_;
    std::vector<Segment> segments_;
    Segment current_;
};

}  // namespace

std::string extract_main_content(const HtmlDocument& doc, const MainContentOptions& options) {
    auto segments = SegmentCollector(doc).run();

    auto link_ok = [&](const Segment& s) {
        double density = s.words == 0 ? 1.0 : static_cast<double>(s.link_words) / static_cast<double>(s.words);
        return density <= options.max_link_density;
    };
    bool any_substantial = std::any_of(segments.begin(), segments.end(), [&](const Segment& s) {
        return link_ok(s) && s.words >= static_cast<std::size_t>(options.min_block_words);
    });

    std::string out;
    for (const auto& s : segments) {
        if (s.words == 0 || !link_ok(s)) continue;
        if (any_substantial && !s.heading && s.words < static_cast<std::size_t>(options.min_block_words)) continue;
        if (!out.empty()) out += "\n\n";
        out += s.text;
    }
    return out;
}

std::string extract_main_content(std::string_view html, const MainContentOptions& options) {
    return extract_main_content(HtmlDocument::parse(html), options);
}

std::vector<AnchorLink> collect_anchors(const HtmlDocument& doc) {
    std::vector<AnchorLink> out;
    for (auto id : doc.elements_by_tag("a")) {
        auto href = doc.attr(id, "href");
        if (!href) continue;
        AnchorLink link;
        link.href = *href;
        link.rel = lower(doc.attr(id, "rel").value_or(""));
        link.anchor_text = collapse_ws(doc.text_content(id));
        out.push_back(std::move(link));
    }
    return out;
}

bool meta_nofollow(const HtmlDocument& doc, std::string_view agent_token) {
    std::string token = lower(agent_token);
    for (auto id : doc.elements_by_tag("meta")) {
        std::string name = lower(doc.attr(id, "name").value_or(""));
        if (name != "robots" && name != token) continue;
        std::string content = lower(doc.attr(id, "content").value_or(""));
        std::size_t pos = 0;
        while (pos < content.size()) {
            auto comma = content.find(',', pos);
            std::string directive = collapse_ws(content.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            if (directive == "nofollow" || directive == "none") return true;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return false;
}

std::optional<std::string> base_href(const HtmlDocument& doc) {
    for (auto id : doc.elements_by_tag("base")) {
        if (auto href = doc.attr(id, "href"); href && !href->empty()) return href;
    }
    return std::nullopt;
}

}  // namespace threatcrawl
