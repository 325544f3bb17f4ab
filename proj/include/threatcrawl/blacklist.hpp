#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

// Registrable domains whose hosts (and subdomains) are never enqueued.
class Blacklist {
public:
    Blacklist() = default;
    explicit Blacklist(std::vector<std::string> domains);

    // Built-in list seeded from the most visited sites (social media, video,
    // shopping, search), none of which serve CTI reporting.
    static Blacklist defaults();
    // Newline-separated domains; '#' starts a comment.
    static Blacklist from_file(const std::filesystem::path& path);
    static Blacklist parse(std::string_view text);

    void add(std::string domain);
    bool blocks_host(std::string_view host) const;
    bool blocks_url(std::string_view url) const;

    std::size_t size() const { return domains_.size(); }
    const std::set<std::string>& domains() const { return domains_; }

private:
    std::set<std::string> domains_;
};

}  // namespace threatcrawl
