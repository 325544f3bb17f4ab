#include <gtest/gtest.h>

#include <random>

#include "threatcrawl/url.hpp"

using namespace threatcrawl;

TEST(Normalize, LowercasesSchemeAndHostButNotPath) {
    EXPECT_EQ(normalize_url("HTTPS://Example.COM/Path/To"), "https://example.com/Path/To");
}

TEST(Normalize, StripsFragment) {
    EXPECT_EQ(normalize_url("https://a.com/p#frag"), "https://a.com/p");
}

TEST(Normalize, DropsDefaultPortsKeepsOthers) {
    EXPECT_EQ(normalize_url("http://a.com:80/x"), "http://a.com/x");
    EXPECT_EQ(normalize_url("https://a.com:443/x"), "https://a.com/x");
    EXPECT_EQ(normalize_url("http://a.com:8080/x"), "http://a.com:8080/x");
    EXPECT_EQ(normalize_url("https://a.com:80/x"), "https://a.com:80/x");
}

TEST(Normalize, EmptyPathBecomesSlash) {
    EXPECT_EQ(normalize_url("https://a.com"), "https://a.com/");
    EXPECT_EQ(normalize_url("https://a.com?q=1"), "https://a.com/?q=1");
}

TEST(Normalize, ResolvesDotSegments) {
    EXPECT_EQ(normalize_url("https://a.com/a/./b/../c"), "https://a.com/a/c");
    EXPECT_EQ(normalize_url("https://a.com/../../x"), "https://a.com/x");
}

TEST(Normalize, PreservesQueryVerbatim) {
    EXPECT_EQ(normalize_url("https://a.com/p?b=2&a=1&A=%41"), "https://a.com/p?b=2&a=1&A=%41");
}

TEST(Normalize, RejectsNonHttpAndRelative) {
    EXPECT_FALSE(normalize_url("ftp://a.com/x"));
    EXPECT_FALSE(normalize_url("mailto:a@b.c"));
    EXPECT_FALSE(normalize_url("/relative/path"));
    EXPECT_FALSE(normalize_url("https:///nohost"));
}

TEST(Normalize, RejectsUserinfo) { EXPECT_FALSE(normalize_url("https://user:pw@a.com/")); }

TEST(Normalize, EncodesSpaces) { EXPECT_EQ(normalize_url("https://a.com/a b"), "https://a.com/a%20b"); }

TEST(Normalize, IsIdempotent) {
    std::mt19937 rng(5);
    const char* pieces[] = {"a", "B", ".", "..", "x y", "%7E", "", "index.html"};
    for (int i = 0; i < 500; ++i) {
        std::string url = std::string(rng() % 2 ? "HTTP" : "https") + "://Host" + std::to_string(rng() % 3) + ".com";
        if (rng() % 3 == 0) url += ":" + std::to_string(rng() % 3 == 0 ? 80 : 8000 + rng() % 5);
        int segs = rng() % 5;
        for (int s = 0; s < segs; ++s) url += std::string("/") + pieces[rng() % 8];
        if (rng() % 2) url += "?q=" + std::to_string(rng() % 10);
        if (rng() % 2) url += "#f";
        auto once = normalize_url(url);
        ASSERT_TRUE(once) << url;
        EXPECT_EQ(normalize_url(*once), once) << url;
        EXPECT_EQ(once->find('#'), std::string::npos);
    }
}

// Reference resolution examples from RFC 3986 section 5.4.
TEST(Resolve, NormalExamples) {
    const std::string base = "http://a/b/c/d;p?q";
    const std::pair<const char*, const char*> cases[] = {
        {"g:h", "g:h"},
        {"g", "http://a/b/c/g"},
        {"./g", "http://a/b/c/g"},
        {"g/", "http://a/b/c/g/"},
        {"/g", "http://a/g"},
        {"//g", "http://g"},
        {"?y", "http://a/b/c/d;p?y"},
        {"g?y", "http://a/b/c/g?y"},
        {"#s", "http://a/b/c/d;p?q#s"},
        {"g#s", "http://a/b/c/g#s"},
        {"g?y#s", "http://a/b/c/g?y#s"},
        {";x", "http://a/b/c/;x"},
        {"g;x", "http://a/b/c/g;x"},
        {"g;x?y#s", "http://a/b/c/g;x?y#s"},
        {"", "http://a/b/c/d;p?q"},
        {".", "http://a/b/c/"},
        {"./", "http://a/b/c/"},
        {"..", "http://a/b/"},
        {"../", "http://a/b/"},
        {"../g", "http://a/b/g"},
        {"../..", "http://a/"},
        {"../../", "http://a/"},
        {"../../g", "http://a/g"},
    };
    for (auto [ref, expected] : cases) EXPECT_EQ(resolve_reference(base, ref), expected) << ref;
}

TEST(Resolve, AbnormalExamples) {
    const std::string base = "http://a/b/c/d;p?q";
    const std::pair<const char*, const char*> cases[] = {
        {"../../../g", "http://a/g"},   {"../../../../g", "http://a/g"}, {"/./g", "http://a/g"},
        {"/../g", "http://a/g"},        {"g.", "http://a/b/c/g."},       {".g", "http://a/b/c/.g"},
        {"g..", "http://a/b/c/g.."},    {"..g", "http://a/b/c/..g"},     {"./../g", "http://a/b/g"},
        {"./g/.", "http://a/b/c/g/"},   {"g/./h", "http://a/b/c/g/h"},   {"g/../h", "http://a/b/c/h"},
        {"g;x=1/./y", "http://a/b/c/g;x=1/y"}, {"g;x=1/../y", "http://a/b/c/y"},
        {"g?y/./x", "http://a/b/c/g?y/./x"},   {"g#s/../x", "http://a/b/c/g#s/../x"},
    };
    for (auto [ref, expected] : cases) EXPECT_EQ(resolve_reference(base, ref), expected) << ref;
}

TEST(Resolve, RootRelativeAgainstDirectory) {
    EXPECT_EQ(resolve_and_normalize("https://x.com/b/", "/a"), "https://x.com/a");
}

TEST(RemoveDotSegments, Examples) {
    EXPECT_EQ(remove_dot_segments("/a/b/c/./../../g"), "/a/g");
    EXPECT_EQ(remove_dot_segments("mid/content=5/../6"), "mid/6");
}

TEST(HttpUrl, AuthorityIncludesNonDefaultPort) {
    auto u = parse_http_url("http://127.0.0.1:8080/a?b");
    ASSERT_TRUE(u);
    EXPECT_EQ(u->authority(), "127.0.0.1:8080");
    EXPECT_EQ(u->origin(), "http://127.0.0.1:8080");
    EXPECT_EQ(u->path_and_query, "/a?b");
    EXPECT_EQ(authority_of("https://Example.com/x"), "example.com");
}
