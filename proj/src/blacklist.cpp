#include "threatcrawl/blacklist.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "threatcrawl/url.hpp"

namespace threatcrawl {

namespace {

constexpr std::array<std::string_view, 100> kDefaultDomains = {
    "google.com",      "youtube.com",      "facebook.com",     "twitter.com",      "x.com",
    "instagram.com",   "baidu.com",        "wikipedia.org",    "yahoo.com",        "yandex.ru",
    "whatsapp.com",    "amazon.com",       "live.com",         "netflix.com",      "reddit.com",
    "tiktok.com",      "linkedin.com",     "office.com",       "bing.com",         "microsoftonline.com",
    "pinterest.com",   "vk.com",           "twitch.tv",        "ebay.com",         "msn.com",
    "duckduckgo.com",  "weather.com",      "qq.com",           "naver.com",        "mail.ru",
    "discord.com",     "zoom.us",          "spotify.com",      "samsung.com",      "aliexpress.com",
    "t.me",            "telegram.org",     "fandom.com",       "imdb.com",         "quora.com",
    "bilibili.com",    "roblox.com",       "paypal.com",       "walmart.com",      "etsy.com",
    "booking.com",     "espn.com",         "cnn.com",          "nytimes.com",      "bbc.co.uk",
    "bbc.com",         "foxnews.com",      "dailymail.co.uk",  "tumblr.com",       "flickr.com",
    "vimeo.com",       "dailymotion.com",  "soundcloud.com",   "snapchat.com",     "threads.net",
    "mastodon.social", "tripadvisor.com",  "yelp.com",         "indeed.com",       "glassdoor.com",
    "craigslist.org",  "target.com",       "bestbuy.com",      "homedepot.com",    "ikea.com",
    "shopify.com",     "canva.com",        "deepl.com",        "openai.com",       "chatgpt.com",
    "doubleclick.net", "googleadservices.com", "googlesyndication.com", "amazon-adsystem.com", "outbrain.com",
    "taboola.com",     "addthis.com",      "sharethis.com",    "disqus.com",       "gravatar.com",
    "wordpress.com",   "blogger.com",      "medium.com",       "substack.com",     "patreon.com",
    "play.google.com", "apps.apple.com",   "itunes.apple.com", "gmail.com",        "outlook.com",
    "hotmail.com",     "icloud.com",       "dropbox.com",      "box.com",          "wetransfer.com"};

std::string clean_domain(std::string_view d) {
    while (!d.empty() && std::isspace(static_cast<unsigned char>(d.front()))) d.remove_prefix(1);
    while (!d.empty() && std::isspace(static_cast<unsigned char>(d.back()))) d.remove_suffix(1);
    if (d.rfind("*.", 0) == 0) d.remove_prefix(2);
    while (!d.empty() && d.front() == '.') d.remove_prefix(1);
    std::string out(d);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

Blacklist::Blacklist(std::vector<std::string> domains) {
    for (auto& d : domains) add(std::move(d));
}

Blacklist Blacklist::defaults() {
    Blacklist bl;
    for (auto d : kDefaultDomains) bl.add(std::string(d));
    return bl;
}

Blacklist Blacklist::parse(std::string_view text) {
    Blacklist bl;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        bl.add(line);
    }
    return bl;
}

Blacklist Blacklist::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read blacklist " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Blacklist::add(std::string domain) {
    std::string d = clean_domain(domain);
    if (!d.empty()) domains_.insert(std::move(d));
}

bool Blacklist::blocks_host(std::string_view host) const {
    std::string h = clean_domain(host);
    // Walk the label suffixes: a.b.example.com, b.example.com, example.com, com.
    std::string_view rest = h;
    while (!rest.empty()) {
        if (domains_.count(std::string(rest))) return true;
        auto dot = rest.find('.');
        if (dot == std::string_view::npos) break;
        rest.remove_prefix(dot + 1);
    }
    return false;
}

bool Blacklist::blocks_url(std::string_view url) const {
    auto parsed = parse_http_url(url);
    return parsed && blocks_host(parsed->host);
}

}  // namespace threatcrawl
